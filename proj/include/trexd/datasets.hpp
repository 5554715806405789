#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trexd/tensor.hpp"

namespace trexd {

// Regenerable dataset description; JSON round-trips bit-exactly via
// {recipe_id, seed, K, n, side}.
struct DatasetRecipe {
    std::string recipe_id;  // "mini_glyphs" | "blobs2d" | "constant_label" | "scene_counts"
    std::uint64_t seed = 0;
    int num_classes = 10;
    int count = 1000;
    int side = 16;  // images are side x side; blobs2d ignores this

    std::string to_json() const;
    static DatasetRecipe from_json(const std::string& text);
};

struct SyntheticDataset {
    std::vector<Tensor> items;
    std::vector<int> labels;
    int num_classes = 0;
    DatasetRecipe recipe;

    std::size_t size() const { return items.size(); }
};

// Builds the dataset described by the recipe. Bit-exact for a fixed recipe.
SyntheticDataset make_dataset(const DatasetRecipe& recipe);

// Deterministic train/holdout split (no shuffling: the generator already
// randomizes item order).
std::pair<SyntheticDataset, SyntheticDataset> split_dataset(const SyntheticDataset& data,
                                                            double holdout_fraction);

// Clean, jitter-free class prototypes for a recipe (used as the labeling
// oracle for generated images). One side x side image per class.
std::vector<Tensor> class_prototypes(const DatasetRecipe& recipe);

// Nearest-prototype label for an image (L2 distance).
int oracle_label(const Tensor& image, const std::vector<Tensor>& prototypes);

// Renders one glyph class with explicit jitter parameters; zero jitter gives
// the canonical prototype.
Tensor render_glyph(int glyph_class, int side, double dx, double dy, double angle, double scale);

}  // namespace trexd
