#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trexd/rng.hpp"
#include "trexd/tensor.hpp"

namespace trexd {

class MlpClassifier;

enum class ShapeKind { kSquare = 0, kDisc = 1, kTriangle = 2, kCross = 3 };

const char* shape_name(ShapeKind s);
ShapeKind shape_from_name(const std::string& name);

struct SceneObject {
    ShapeKind shape = ShapeKind::kDisc;
    int color = 0;        // gray-level index in [0, num_colors)
    double size = 3.0;    // radius, px
    double cx = 16.0;     // center, px
    double cy = 16.0;
};

// Ordered object list; list order is painter's order for the rasterizer.
struct SceneGraph {
    std::vector<SceneObject> objects;
};

// Latent prior over scenes: uniform object count over a range, uniform
// categorical attributes over the allowed support, uniform continuous
// attributes within their ranges, subject to a minimum pairwise separation.
struct ScenePrior {
    int min_objects = 1;
    int max_objects = 4;
    int num_colors = 4;
    double min_size = 2.0;
    double max_size = 6.0;
    int canvas_side = 32;
    double margin = 6.0;              // positions live in [margin, side - margin]
    double separation_factor = 0.8;   // centers at least this x (size_a + size_b) apart
    std::vector<ShapeKind> excluded_shapes;  // never generated or proposed
    std::vector<ShapeKind> novel_shapes;     // added on top of the base set

    // Base shapes minus excluded plus novel.
    std::vector<ShapeKind> allowed_shapes() const;
    bool shape_allowed(ShapeKind s) const;
    double pos_lo() const { return margin; }
    double pos_hi() const { return canvas_side - margin; }
};

bool scene_valid(const ScenePrior& prior, const SceneGraph& scene);

// Rejection-samples a scene satisfying the prior's constraints. Throws
// ConfigError if the separation constraint cannot be met in 1000 tries.
SceneGraph sample_scene(const ScenePrior& prior, Rng& rng);

struct Rasterizer {
    int side = 32;
};

// Deterministic grayscale render, values in [0,1], later objects overdraw
// earlier ones, no anti-aliasing (pixel-center test).
Tensor render(const Rasterizer& r, const SceneGraph& scene);
Tensor render_without(const Rasterizer& r, const SceneGraph& scene, std::size_t skip_index);

// Symmetric mixed proposal: Gaussian jitter on size/position, categorical
// resample of shape/color with probability flip_prob per variable. Returns
// nullopt when the proposed scene violates the prior's constraints; the
// caller rejects the whole step so symmetry is preserved.
std::optional<SceneGraph> propose_scene(const SceneGraph& scene, double jitter_std,
                                        double flip_prob, const ScenePrior& support, Rng& rng);

// Density of the proposal kernel above, ignoring the validity truncation
// (invalid moves are Metropolis-rejected, not renormalized).
double log_scene_proposal_density(const SceneGraph& from, const SceneGraph& to, double jitter_std,
                                  double flip_prob, const ScenePrior& support);

// Log prior density; -inf when the scene is outside the support.
double log_scene_prior(const ScenePrior& prior, const SceneGraph& scene);

int count_shape(const SceneGraph& scene, ShapeKind s);

// Fixed-width numeric encoding for CSV export: [count, then per slot
// (shape, color, size, cx, cy)], padded with zeros up to max_objects slots.
std::vector<double> flatten_scene(const SceneGraph& scene, int max_objects);

std::string scene_to_json(const SceneGraph& scene);
SceneGraph scene_from_json(const std::string& text);

struct RemovalEffect {
    std::size_t object_index;
    double confidence_after;
    double drop;  // confidence(full scene) - confidence_after
};

// Re-renders the scene with each object removed in turn and reports the
// target-class confidence, sorted by largest drop first. Requires >= 2
// objects.
std::vector<RemovalEffect> remove_object_probe(const SceneGraph& scene,
                                               const MlpClassifier& classifier, int target_class);

}  // namespace trexd
