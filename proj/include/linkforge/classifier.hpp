#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace linkforge {

/// One training example: a feature row and its binary label (1 = match).
struct LabeledPair {
    std::vector<double> features;
    int label = 0;
};

struct Dataset {
    int schema_version = 0;
    std::vector<std::string> feature_names;
    std::vector<LabeledPair> pairs;

    std::size_t dim() const { return feature_names.size(); }
};

enum class ModelKind : std::uint8_t { logreg = 0, forest = 1 };

struct LogRegHyper {
    double learning_rate = 0.5;
    int iterations = 500;
    double l2 = 1e-3;
};

struct ForestHyper {
    int n_trees = 100;
    int max_depth = 12;
    int min_leaf = 2;
};

struct TrainOptions {
    LogRegHyper logreg;
    ForestHyper forest;
    std::uint64_t seed = 1;
    int workers = 1;  // tree training threads; never changes the result
};

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint8_t leaf_label = 0;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    int predict(std::span<const double> row) const;
};

// Trained binary classifier. Logistic regression standardizes features
// internally; the forest is bagged CART trees with Gini splits and a
// sqrt(d) feature sample per split, each tree seeded from (seed, tree index)
// so results do not depend on the worker count.
struct Model {
    ModelKind kind = ModelKind::logreg;
    int feature_schema_version = 0;
    std::size_t feature_dim = 0;
    double decision_threshold = 0.5;
    std::uint64_t seed = 0;

    // logreg parameters
    std::vector<double> mean;
    std::vector<double> stdev;
    std::vector<double> weights;
    double bias = 0.0;

    std::vector<DecisionTree> trees;

    /// P(label = 1). Throws on a row of the wrong width.
    double predict_proba(std::span<const double> row) const;

    void save(std::ostream& os) const;
    void save(const std::filesystem::path& path) const;
    static Model load(std::istream& is);
    static Model load(const std::filesystem::path& path);
};

struct Prediction {
    int label = 0;
    double probability = 0.0;
};

/// Requires examples of both classes; deterministic for a fixed options.seed.
Model train(const Dataset& data, ModelKind kind, const TrainOptions& options = {});

/// label = 1 iff probability >= model.decision_threshold. Schema mismatch throws.
Prediction predict(const Model& model, std::span<const double> row, int schema_version);

struct BinaryMetrics {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    double precision = 1.0;  // 1.0 under the 0/0 convention
    double recall = 1.0;
    double f1 = 0.0;
};

BinaryMetrics binary_metrics(std::span<const int> truth, std::span<const int> predicted);

struct CVReport {
    int folds = 0;
    std::vector<BinaryMetrics> per_fold;
    double mean_precision = 0.0;
    double mean_recall = 0.0;
    double mean_f1 = 0.0;
    BinaryMetrics pooled;  // over concatenated out-of-fold predictions
};

/// Stratified k-fold cross-validation. Needs k >= 2 and both classes in
/// every training split.
CVReport cross_validate(const Dataset& data, ModelKind kind, const TrainOptions& options, int k);

/// Best mean-F1 lattice point; ties go to the earliest entry.
std::pair<TrainOptions, CVReport> grid_search(const Dataset& data, ModelKind kind,
                                              const std::vector<TrainOptions>& grid, int k);

/// Default forest lattice: trees {50,100,200} x depth {8,12,16}.
std::vector<TrainOptions> default_forest_grid(std::uint64_t seed = 1);

// Information gain of each feature against the label, in bits, with
// continuous features cut into up to 10 equal-frequency bins. Sorted
// descending; single-class data gives all zeros.
std::vector<std::pair<std::string, double>> information_gain(const Dataset& data);

// Loss and gradient of L2-regularized logistic loss at a given parameter
// vector (weights followed by the bias, which is not penalized). Exposed so
// the gradient can be checked against finite differences.
double logreg_loss(std::span<const double> params, const std::vector<std::vector<double>>& rows,
                   std::span<const int> labels, double l2);
std::vector<double> logreg_gradient(std::span<const double> params,
                                    const std::vector<std::vector<double>>& rows,
                                    std::span<const int> labels, double l2);

}  // namespace linkforge
