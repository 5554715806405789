#include "trexd/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "trexd/errors.hpp"
#include "trexd/models.hpp"

namespace trexd {

namespace {

constexpr ShapeKind kBaseShapes[] = {ShapeKind::kSquare, ShapeKind::kDisc, ShapeKind::kTriangle};

// Gray level per color index; spaced away from the black background.
double color_level(int color, int num_colors) {
    return 0.35 + 0.6 * static_cast<double>(color) / static_cast<double>(num_colors - 1);
}

bool point_in_object(const SceneObject& o, double x, double y) {
    const double dx = x - o.cx;
    const double dy = y - o.cy;
    const double s = o.size;
    switch (o.shape) {
        case ShapeKind::kSquare:
            return std::abs(dx) <= s && std::abs(dy) <= s;
        case ShapeKind::kDisc:
            return dx * dx + dy * dy <= s * s;
        case ShapeKind::kTriangle: {
            // upward triangle: apex (0,-s), base corners (+-0.9s, +0.75s)
            if (dy < -s || dy > 0.75 * s) return false;
            const double t = (dy + s) / (1.75 * s);  // 0 at apex, 1 at base
            return std::abs(dx) <= 0.9 * s * t;
        }
        case ShapeKind::kCross:
            return (std::abs(dx) <= 0.35 * s && std::abs(dy) <= s) ||
                   (std::abs(dy) <= 0.35 * s && std::abs(dx) <= s);
    }
    return false;
}

double gauss_logpdf(double x, double mean, double stddev) {
    const double z = (x - mean) / stddev;
    return -0.5 * z * z - std::log(stddev * std::sqrt(2.0 * M_PI));
}

bool separation_ok(const ScenePrior& prior, const std::vector<SceneObject>& objs) {
    for (std::size_t a = 0; a < objs.size(); ++a) {
        for (std::size_t b = a + 1; b < objs.size(); ++b) {
            const double dx = objs[a].cx - objs[b].cx;
            const double dy = objs[a].cy - objs[b].cy;
            const double need = prior.separation_factor * (objs[a].size + objs[b].size);
            if (dx * dx + dy * dy < need * need) return false;
        }
    }
    return true;
}

}  // namespace

const char* shape_name(ShapeKind s) {
    switch (s) {
        case ShapeKind::kSquare: return "square";
        case ShapeKind::kDisc: return "disc";
        case ShapeKind::kTriangle: return "triangle";
        case ShapeKind::kCross: return "cross";
    }
    return "?";
}

ShapeKind shape_from_name(const std::string& name) {
    for (ShapeKind s : {ShapeKind::kSquare, ShapeKind::kDisc, ShapeKind::kTriangle, ShapeKind::kCross}) {
        if (name == shape_name(s)) return s;
    }
    throw ConfigError("unknown shape name: " + name);
}

std::vector<ShapeKind> ScenePrior::allowed_shapes() const {
    std::vector<ShapeKind> out;
    for (ShapeKind s : kBaseShapes) {
        if (std::find(excluded_shapes.begin(), excluded_shapes.end(), s) == excluded_shapes.end())
            out.push_back(s);
    }
    for (ShapeKind s : novel_shapes) {
        if (std::find(out.begin(), out.end(), s) == out.end() &&
            std::find(excluded_shapes.begin(), excluded_shapes.end(), s) == excluded_shapes.end())
            out.push_back(s);
    }
    if (out.empty()) throw ConfigError("scene prior excludes every shape");
    return out;
}

bool ScenePrior::shape_allowed(ShapeKind s) const {
    const auto allowed = allowed_shapes();
    return std::find(allowed.begin(), allowed.end(), s) != allowed.end();
}

bool scene_valid(const ScenePrior& prior, const SceneGraph& scene) {
    if (scene.objects.empty()) return false;
    if (static_cast<int>(scene.objects.size()) < prior.min_objects ||
        static_cast<int>(scene.objects.size()) > prior.max_objects)
        return false;
    for (const SceneObject& o : scene.objects) {
        if (!prior.shape_allowed(o.shape)) return false;
        if (o.color < 0 || o.color >= prior.num_colors) return false;
        if (o.size < prior.min_size || o.size > prior.max_size) return false;
        if (o.cx < prior.pos_lo() || o.cx > prior.pos_hi()) return false;
        if (o.cy < prior.pos_lo() || o.cy > prior.pos_hi()) return false;
    }
    return separation_ok(prior, scene.objects);
}

SceneGraph sample_scene(const ScenePrior& prior, Rng& rng) {
    if (prior.min_objects < 1 || prior.max_objects < prior.min_objects)
        throw ConfigError("invalid scene object-count range");
    const auto shapes = prior.allowed_shapes();
    const int count = static_cast<int>(rng.uniform_int(prior.min_objects, prior.max_objects));
    for (int attempt = 0; attempt < 1000; ++attempt) {
        SceneGraph scene;
        scene.objects.reserve(count);
        for (int i = 0; i < count; ++i) {
            SceneObject o;
            o.shape = shapes[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(shapes.size()) - 1))];
            o.color = static_cast<int>(rng.uniform_int(0, prior.num_colors - 1));
            o.size = prior.min_size + (prior.max_size - prior.min_size) * rng.uniform();
            o.cx = prior.pos_lo() + (prior.pos_hi() - prior.pos_lo()) * rng.uniform();
            o.cy = prior.pos_lo() + (prior.pos_hi() - prior.pos_lo()) * rng.uniform();
            scene.objects.push_back(o);
        }
        if (separation_ok(prior, scene.objects)) return scene;
    }
    throw ConfigError("separation constraint unsatisfiable for requested object count");
}

Tensor render(const Rasterizer& r, const SceneGraph& scene) {
    const std::size_t side = static_cast<std::size_t>(r.side);
    std::vector<double> px(side * side, 0.0);
    for (const SceneObject& o : scene.objects) {
        const double level = color_level(o.color, 4);
        // bounding box keeps the per-object cost proportional to its area
        const int x0 = std::max(0, static_cast<int>(std::floor(o.cx - o.size - 1)));
        const int x1 = std::min(static_cast<int>(side) - 1, static_cast<int>(std::ceil(o.cx + o.size + 1)));
        const int y0 = std::max(0, static_cast<int>(std::floor(o.cy - o.size - 1)));
        const int y1 = std::min(static_cast<int>(side) - 1, static_cast<int>(std::ceil(o.cy + o.size + 1)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                if (point_in_object(o, x + 0.5, y + 0.5))
                    px[static_cast<std::size_t>(y) * side + static_cast<std::size_t>(x)] = level;
            }
        }
    }
    return Tensor({side, side}, std::move(px));
}

Tensor render_without(const Rasterizer& r, const SceneGraph& scene, std::size_t skip_index) {
    SceneGraph reduced;
    for (std::size_t i = 0; i < scene.objects.size(); ++i)
        if (i != skip_index) reduced.objects.push_back(scene.objects[i]);
    return render(r, reduced);
}

std::optional<SceneGraph> propose_scene(const SceneGraph& scene, double jitter_std, double flip_prob,
                                        const ScenePrior& support, Rng& rng) {
    const auto shapes = support.allowed_shapes();
    SceneGraph next = scene;
    for (SceneObject& o : next.objects) {
        o.cx += rng.normal(0.0, jitter_std);
        o.cy += rng.normal(0.0, jitter_std);
        o.size += rng.normal(0.0, jitter_std);
        if (rng.uniform() < flip_prob) {
            o.shape = shapes[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(shapes.size()) - 1))];
        }
        if (rng.uniform() < flip_prob) {
            o.color = static_cast<int>(rng.uniform_int(0, support.num_colors - 1));
        }
    }
    if (!scene_valid(support, next)) return std::nullopt;
    return next;
}

double log_scene_proposal_density(const SceneGraph& from, const SceneGraph& to, double jitter_std,
                                  double flip_prob, const ScenePrior& support) {
    if (from.objects.size() != to.objects.size())
        throw ContractError("proposal density requires equal object counts");
    const double n_shapes = static_cast<double>(support.allowed_shapes().size());
    double lp = 0.0;
    for (std::size_t i = 0; i < from.objects.size(); ++i) {
        const SceneObject& a = from.objects[i];
        const SceneObject& b = to.objects[i];
        lp += gauss_logpdf(b.cx, a.cx, jitter_std);
        lp += gauss_logpdf(b.cy, a.cy, jitter_std);
        lp += gauss_logpdf(b.size, a.size, jitter_std);
        const double stay_shape = (b.shape == a.shape) ? (1.0 - flip_prob) + flip_prob / n_shapes
                                                       : flip_prob / n_shapes;
        const double stay_color = (b.color == a.color)
                                      ? (1.0 - flip_prob) + flip_prob / support.num_colors
                                      : flip_prob / support.num_colors;
        lp += std::log(stay_shape) + std::log(stay_color);
    }
    return lp;
}

double log_scene_prior(const ScenePrior& prior, const SceneGraph& scene) {
    if (!scene_valid(prior, scene)) return -std::numeric_limits<double>::infinity();
    const double n_counts = static_cast<double>(prior.max_objects - prior.min_objects + 1);
    const double n_shapes = static_cast<double>(prior.allowed_shapes().size());
    const double size_range = prior.max_size - prior.min_size;
    const double pos_range = prior.pos_hi() - prior.pos_lo();
    double lp = -std::log(n_counts);
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        lp += -std::log(n_shapes) - std::log(static_cast<double>(prior.num_colors)) -
              std::log(size_range) - 2.0 * std::log(pos_range);
    }
    return lp;
}

int count_shape(const SceneGraph& scene, ShapeKind s) {
    int n = 0;
    for (const SceneObject& o : scene.objects)
        if (o.shape == s) ++n;
    return n;
}

std::vector<double> flatten_scene(const SceneGraph& scene, int max_objects) {
    std::vector<double> out;
    out.reserve(1 + 5 * static_cast<std::size_t>(max_objects));
    out.push_back(static_cast<double>(scene.objects.size()));
    for (int i = 0; i < max_objects; ++i) {
        if (i < static_cast<int>(scene.objects.size())) {
            const SceneObject& o = scene.objects[static_cast<std::size_t>(i)];
            out.push_back(static_cast<double>(o.shape));
            out.push_back(static_cast<double>(o.color));
            out.push_back(o.size);
            out.push_back(o.cx);
            out.push_back(o.cy);
        } else {
            out.insert(out.end(), {0.0, 0.0, 0.0, 0.0, 0.0});
        }
    }
    return out;
}

std::string scene_to_json(const SceneGraph& scene) {
    nlohmann::json arr = nlohmann::json::array();
    for (const SceneObject& o : scene.objects) {
        arr.push_back({{"shape", shape_name(o.shape)},
                       {"color", o.color},
                       {"size", o.size},
                       {"cx", o.cx},
                       {"cy", o.cy}});
    }
    return arr.dump();
}

SceneGraph scene_from_json(const std::string& text) {
    nlohmann::json arr = nlohmann::json::parse(text);
    if (!arr.is_array()) throw CorruptFileError("scene JSON must be an array of objects");
    SceneGraph scene;
    for (const auto& item : arr) {
        SceneObject o;
        o.shape = shape_from_name(item.at("shape").get<std::string>());
        o.color = item.at("color").get<int>();
        o.size = item.at("size").get<double>();
        o.cx = item.at("cx").get<double>();
        o.cy = item.at("cy").get<double>();
        scene.objects.push_back(o);
    }
    return scene;
}

std::vector<RemovalEffect> remove_object_probe(const SceneGraph& scene,
                                               const MlpClassifier& classifier, int target_class) {
    if (scene.objects.size() < 2) throw ContractError("removal probe requires at least 2 objects");
    const Rasterizer raster;
    const Tensor base = render(raster, scene);
    const double conf_before =
        classifier.classify(base)[static_cast<std::size_t>(target_class)];
    std::vector<RemovalEffect> effects;
    effects.reserve(scene.objects.size());
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        const Tensor img = render_without(raster, scene, i);
        const double conf = classifier.classify(img)[static_cast<std::size_t>(target_class)];
        effects.push_back(RemovalEffect{i, conf, conf_before - conf});
    }
    std::stable_sort(effects.begin(), effects.end(),
                     [](const RemovalEffect& a, const RemovalEffect& b) { return a.drop > b.drop; });
    return effects;
}

}  // namespace trexd
