#include "trexd/datasets.hpp"

#include <cmath>
#include <utility>

#include <json.hpp>

#include "trexd/errors.hpp"
#include "trexd/rng.hpp"
#include "trexd/scene.hpp"

namespace trexd {

namespace {

// Glyph interiors in canonical [-1,1]^2 coordinates.
bool glyph_inside(int glyph_class, double x, double y) {
    const double r = std::sqrt(x * x + y * y);
    switch (glyph_class) {
        case 0:  // ring
            return r >= 0.5 && r <= 0.85;
        case 1:  // vertical bar
            return std::abs(x) <= 0.18 && std::abs(y) <= 0.8;
        case 2:  // horizontal bar
            return std::abs(y) <= 0.18 && std::abs(x) <= 0.8;
        case 3:  // filled disc
            return r <= 0.6;
        case 4:  // plus
            return (std::abs(x) <= 0.17 && std::abs(y) <= 0.8) ||
                   (std::abs(y) <= 0.17 && std::abs(x) <= 0.8);
        case 5: {  // diagonal cross
            const double u = (x + y) * M_SQRT1_2;
            const double v = (x - y) * M_SQRT1_2;
            return (std::abs(u) <= 0.17 && std::abs(v) <= 0.8) ||
                   (std::abs(v) <= 0.17 && std::abs(u) <= 0.8);
        }
        case 6: {  // square outline
            const double m = std::max(std::abs(x), std::abs(y));
            return m >= 0.5 && m <= 0.8;
        }
        case 7:  // filled triangle, apex up
            if (y < -0.8 || y > 0.62) return false;
            return std::abs(x) <= 0.85 * (y + 0.8) / 1.42;
        case 8: {  // two stacked discs
            const double d1 = std::hypot(x, y - 0.42);
            const double d2 = std::hypot(x, y + 0.42);
            return d1 <= 0.36 || d2 <= 0.36;
        }
        case 9:  // corner / L-shape
            return (x >= -0.6 && x <= -0.25 && std::abs(y) <= 0.8) ||
                   (y >= 0.45 && y <= 0.8 && x >= -0.6 && x <= 0.65);
        default:
            throw ContractError("glyph class out of range");
    }
}

SyntheticDataset make_blobs2d(const DatasetRecipe& recipe) {
    if (recipe.num_classes != 2) throw ConfigError("blobs2d recipe requires K=2");
    Rng rng(recipe.seed);
    SyntheticDataset data;
    data.num_classes = 2;
    data.recipe = recipe;
    // centers (-3,0) and (3,0), unit stddev: 6-sigma separation
    for (int i = 0; i < recipe.count; ++i) {
        const int label = static_cast<int>(rng.uniform_int(0, 1));
        const double cx = label == 0 ? -3.0 : 3.0;
        data.items.push_back(Tensor({2}, {cx + rng.normal(), rng.normal()}));
        data.labels.push_back(label);
    }
    return data;
}

SyntheticDataset make_mini_glyphs(const DatasetRecipe& recipe, bool constant_label) {
    if (recipe.num_classes < 1 || recipe.num_classes > 10)
        throw ConfigError("mini_glyphs supports 1..10 classes");
    Rng rng(recipe.seed);
    SyntheticDataset data;
    data.num_classes = recipe.num_classes;
    data.recipe = recipe;
    for (int i = 0; i < recipe.count; ++i) {
        const int glyph = static_cast<int>(rng.uniform_int(0, recipe.num_classes - 1));
        const double dx = rng.normal(0.0, 0.08);
        const double dy = rng.normal(0.0, 0.08);
        const double angle = rng.normal(0.0, 0.12);
        const double scl = 1.0 + rng.normal(0.0, 0.08);
        data.items.push_back(render_glyph(glyph, recipe.side, dx, dy, angle, scl));
        data.labels.push_back(constant_label ? 0 : glyph);
    }
    return data;
}

SyntheticDataset make_scene_counts(const DatasetRecipe& recipe) {
    if (recipe.num_classes < 2) throw ConfigError("scene_counts requires K>=2");
    Rng rng(recipe.seed);
    ScenePrior prior;
    prior.canvas_side = recipe.side;
    SyntheticDataset data;
    data.num_classes = recipe.num_classes;
    data.recipe = recipe;
    const Rasterizer raster{recipe.side};
    // balanced classes: keep drawing scenes until each square-count class has
    // its quota
    const int per_class = recipe.count / recipe.num_classes;
    std::vector<int> remaining(static_cast<std::size_t>(recipe.num_classes), per_class);
    remaining[0] += recipe.count - per_class * recipe.num_classes;
    std::vector<std::pair<Tensor, int>> staged;
    int filled = 0;
    long guard = 0;
    while (filled < recipe.count) {
        if (++guard > 400L * recipe.count)
            throw ConfigError("scene_counts class balancing did not converge");
        const SceneGraph scene = sample_scene(prior, rng);
        const int squares = count_shape(scene, ShapeKind::kSquare);
        const int label = std::min(squares, recipe.num_classes - 1);
        if (remaining[static_cast<std::size_t>(label)] == 0) continue;
        --remaining[static_cast<std::size_t>(label)];
        ++filled;
        staged.emplace_back(render(raster, scene), label);
    }
    for (auto& [img, label] : staged) {
        data.items.push_back(std::move(img));
        data.labels.push_back(label);
    }
    return data;
}

}  // namespace

Tensor render_glyph(int glyph_class, int side, double dx, double dy, double angle, double scale) {
    const double ca = std::cos(angle), sa = std::sin(angle);
    std::vector<double> px(static_cast<std::size_t>(side) * side, 0.0);
    const double inv_scale = 1.0 / scale;
    // 2x2 supersampling for soft edges
    const double offs[2] = {0.25, 0.75};
    for (int yy = 0; yy < side; ++yy) {
        for (int xx = 0; xx < side; ++xx) {
            double cov = 0.0;
            for (double oy : offs) {
                for (double ox : offs) {
                    const double u = 2.0 * (xx + ox) / side - 1.0 - dx;
                    const double v = 2.0 * (yy + oy) / side - 1.0 - dy;
                    const double gx = (ca * u + sa * v) * inv_scale;
                    const double gy = (-sa * u + ca * v) * inv_scale;
                    if (glyph_inside(glyph_class, gx, gy)) cov += 0.25;
                }
            }
            px[static_cast<std::size_t>(yy) * side + xx] = cov;
        }
    }
    return Tensor({static_cast<std::size_t>(side), static_cast<std::size_t>(side)}, std::move(px));
}

std::string DatasetRecipe::to_json() const {
    nlohmann::json j = {{"recipe_id", recipe_id},
                        {"seed", seed},
                        {"K", num_classes},
                        {"n", count},
                        {"side", side}};
    return j.dump();
}

DatasetRecipe DatasetRecipe::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    DatasetRecipe r;
    r.recipe_id = j.at("recipe_id").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.num_classes = j.at("K").get<int>();
    r.count = j.at("n").get<int>();
    r.side = j.at("side").get<int>();
    return r;
}

SyntheticDataset make_dataset(const DatasetRecipe& recipe) {
    if (recipe.count < 1) throw ConfigError("dataset count must be >= 1");
    if (recipe.recipe_id == "blobs2d") return make_blobs2d(recipe);
    if (recipe.recipe_id == "mini_glyphs") return make_mini_glyphs(recipe, false);
    if (recipe.recipe_id == "constant_label") return make_mini_glyphs(recipe, true);
    if (recipe.recipe_id == "scene_counts") return make_scene_counts(recipe);
    throw ConfigError("unknown dataset recipe: " + recipe.recipe_id);
}

std::pair<SyntheticDataset, SyntheticDataset> split_dataset(const SyntheticDataset& data,
                                                            double holdout_fraction) {
    if (holdout_fraction < 0.0 || holdout_fraction >= 1.0)
        throw ContractError("holdout fraction must be in [0,1)");
    const std::size_t holdout = static_cast<std::size_t>(holdout_fraction * data.size());
    const std::size_t train = data.size() - holdout;
    SyntheticDataset a, b;
    a.num_classes = b.num_classes = data.num_classes;
    a.recipe = b.recipe = data.recipe;
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto& dst = i < train ? a : b;
        dst.items.push_back(data.items[i]);
        dst.labels.push_back(data.labels[i]);
    }
    return {std::move(a), std::move(b)};
}

std::vector<Tensor> class_prototypes(const DatasetRecipe& recipe) {
    std::vector<Tensor> protos;
    if (recipe.recipe_id == "mini_glyphs" || recipe.recipe_id == "constant_label") {
        for (int c = 0; c < recipe.num_classes; ++c)
            protos.push_back(render_glyph(c, recipe.side, 0.0, 0.0, 0.0, 1.0));
        return protos;
    }
    if (recipe.recipe_id == "blobs2d") {
        protos.push_back(Tensor({2}, {-3.0, 0.0}));
        protos.push_back(Tensor({2}, {3.0, 0.0}));
        return protos;
    }
    throw ConfigError("no prototypes defined for recipe: " + recipe.recipe_id);
}

int oracle_label(const Tensor& image, const std::vector<Tensor>& prototypes) {
    if (prototypes.empty()) throw ContractError("oracle_label needs prototypes");
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < prototypes.size(); ++c) {
        if (prototypes[c].size() != image.size())
            throw DimensionError("prototype/image size mismatch");
        double d = 0.0;
        for (std::size_t i = 0; i < image.size(); ++i) {
            const double diff = image[i] - prototypes[c][i];
            d += diff * diff;
        }
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

}  // namespace trexd
