#include "linkforge/classifier.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

#include "binio.hpp"
#include "linkforge/error.hpp"
#include "linkforge/rng.hpp"

namespace linkforge {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_trainable(const Dataset& data) {
    if (data.pairs.empty()) throw Error("training data is empty");
    bool has0 = false, has1 = false;
    for (const auto& p : data.pairs) {
        if (p.features.size() != data.dim()) {
            throw Error("feature row width " + std::to_string(p.features.size()) +
                        " does not match schema width " + std::to_string(data.dim()));
        }
        (p.label ? has1 : has0) = true;
    }
    if (!has0 || !has1) throw Error("training data must contain both classes");
}

}  // namespace

double logreg_loss(std::span<const double> params, const std::vector<std::vector<double>>& rows,
                   std::span<const int> labels, double l2) {
    std::size_t d = params.size() - 1;
    double bias = params[d];
    double loss = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double z = bias;
        for (std::size_t j = 0; j < d; ++j) z += params[j] * rows[i][j];
        // log(1 + exp(-y*z)) written stably
        double yz = labels[i] ? z : -z;
        loss += yz > 0 ? std::log1p(std::exp(-yz)) : -yz + std::log1p(std::exp(yz));
    }
    loss /= static_cast<double>(rows.size());
    for (std::size_t j = 0; j < d; ++j) loss += 0.5 * l2 * params[j] * params[j];
    return loss;
}

std::vector<double> logreg_gradient(std::span<const double> params,
                                    const std::vector<std::vector<double>>& rows,
                                    std::span<const int> labels, double l2) {
    std::size_t d = params.size() - 1;
    double bias = params[d];
    std::vector<double> grad(d + 1, 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double z = bias;
        for (std::size_t j = 0; j < d; ++j) z += params[j] * rows[i][j];
        double err = sigmoid(z) - static_cast<double>(labels[i]);
        for (std::size_t j = 0; j < d; ++j) grad[j] += err * rows[i][j];
        grad[d] += err;
    }
    double inv_n = 1.0 / static_cast<double>(rows.size());
    for (auto& g : grad) g *= inv_n;
    for (std::size_t j = 0; j < d; ++j) grad[j] += l2 * params[j];
    return grad;
}

namespace {

Model train_logreg(const Dataset& data, const TrainOptions& options) {
    std::size_t d = data.dim();
    std::size_t n = data.pairs.size();

    Model m;
    m.kind = ModelKind::logreg;
    m.feature_schema_version = data.schema_version;
    m.feature_dim = d;
    m.seed = options.seed;
    m.mean.assign(d, 0.0);
    m.stdev.assign(d, 1.0);

    for (const auto& p : data.pairs) {
        for (std::size_t j = 0; j < d; ++j) m.mean[j] += p.features[j];
    }
    for (std::size_t j = 0; j < d; ++j) m.mean[j] /= static_cast<double>(n);
    std::vector<double> var(d, 0.0);
    for (const auto& p : data.pairs) {
        for (std::size_t j = 0; j < d; ++j) {
            double delta = p.features[j] - m.mean[j];
            var[j] += delta * delta;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        double s = std::sqrt(var[j] / static_cast<double>(n));
        m.stdev[j] = s > 1e-12 ? s : 1.0;
    }

    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            rows[i][j] = (data.pairs[i].features[j] - m.mean[j]) / m.stdev[j];
        }
        labels[i] = data.pairs[i].label;
    }

    std::vector<double> params(d + 1, 0.0);
    for (int it = 0; it < options.logreg.iterations; ++it) {
        auto grad = logreg_gradient(params, rows, labels, options.logreg.l2);
        for (std::size_t j = 0; j <= d; ++j) params[j] -= options.logreg.learning_rate * grad[j];
    }
    m.weights.assign(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(d));
    m.bias = params[d];
    return m;
}

// ---- CART ----

struct TreeBuilder {
    const Dataset& data;
    const ForestHyper& hyper;
    std::size_t dim;
    std::size_t n_split_features;
    Rng rng;
    std::vector<TreeNode> nodes;

    TreeBuilder(const Dataset& d, const ForestHyper& h, Rng r)
        : data(d), hyper(h), dim(d.dim()),
          n_split_features(std::max<std::size_t>(
              1, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(d.dim())))))),
          rng(r) {}

    static double gini(std::size_t pos, std::size_t total) {
        if (total == 0) return 0.0;
        double p = static_cast<double>(pos) / static_cast<double>(total);
        return 2.0 * p * (1.0 - p);
    }

    std::uint8_t majority(const std::vector<std::uint32_t>& idx) const {
        std::size_t pos = 0;
        for (auto i : idx) pos += static_cast<std::size_t>(data.pairs[i].label);
        return pos * 2 >= idx.size() ? 1 : 0;
    }

    std::int32_t build(std::vector<std::uint32_t>& idx, int depth) {
        std::size_t pos = 0;
        for (auto i : idx) pos += static_cast<std::size_t>(data.pairs[i].label);
        bool pure = pos == 0 || pos == idx.size();
        if (pure || depth >= hyper.max_depth ||
            idx.size() < 2 * static_cast<std::size_t>(hyper.min_leaf)) {
            return make_leaf(idx);
        }

        // Feature sample without replacement.
        std::vector<std::uint32_t> candidates(dim);
        std::iota(candidates.begin(), candidates.end(), 0);
        for (std::size_t j = 0; j < n_split_features && j + 1 < dim; ++j) {
            std::size_t swap_with = j + static_cast<std::size_t>(rng.below(dim - j));
            std::swap(candidates[j], candidates[swap_with]);
        }
        candidates.resize(std::min(n_split_features, dim));
        std::sort(candidates.begin(), candidates.end());

        double parent_gini = gini(pos, idx.size());
        double best_gain = 1e-12;
        std::int32_t best_feature = -1;
        double best_threshold = 0.0;

        std::vector<std::pair<double, int>> values(idx.size());
        for (auto f : candidates) {
            for (std::size_t i = 0; i < idx.size(); ++i) {
                values[i] = {data.pairs[idx[i]].features[f], data.pairs[idx[i]].label};
            }
            std::sort(values.begin(), values.end());
            std::size_t left_n = 0, left_pos = 0;
            for (std::size_t i = 0; i + 1 < values.size(); ++i) {
                ++left_n;
                left_pos += static_cast<std::size_t>(values[i].second);
                if (values[i].first == values[i + 1].first) continue;
                std::size_t right_n = values.size() - left_n;
                if (left_n < static_cast<std::size_t>(hyper.min_leaf) ||
                    right_n < static_cast<std::size_t>(hyper.min_leaf)) {
                    continue;
                }
                double wl = static_cast<double>(left_n) / static_cast<double>(values.size());
                double child =
                    wl * gini(left_pos, left_n) + (1.0 - wl) * gini(pos - left_pos, right_n);
                double gain = parent_gini - child;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<std::int32_t>(f);
                    best_threshold = 0.5 * (values[i].first + values[i + 1].first);
                }
            }
        }
        if (best_feature < 0) return make_leaf(idx);

        std::vector<std::uint32_t> left, right;
        for (auto i : idx) {
            (data.pairs[i].features[static_cast<std::size_t>(best_feature)] <= best_threshold
                 ? left
                 : right)
                .push_back(i);
        }
        std::int32_t node = static_cast<std::int32_t>(nodes.size());
        nodes.push_back({best_feature, best_threshold, -1, -1, 0});
        nodes[static_cast<std::size_t>(node)].left = build(left, depth + 1);
        nodes[static_cast<std::size_t>(node)].right = build(right, depth + 1);
        return node;
    }

    std::int32_t make_leaf(const std::vector<std::uint32_t>& idx) {
        std::int32_t node = static_cast<std::int32_t>(nodes.size());
        nodes.push_back({-1, 0.0, -1, -1, majority(idx)});
        return node;
    }
};

DecisionTree build_tree(const Dataset& data, const ForestHyper& hyper, Rng rng) {
    std::size_t n = data.pairs.size();
    std::vector<std::uint32_t> sample(n);
    for (std::size_t i = 0; i < n; ++i) sample[i] = static_cast<std::uint32_t>(rng.below(n));

    TreeBuilder builder(data, hyper, rng);
    // Parents are pushed before their children, so the root is node 0.
    builder.build(sample, 0);
    DecisionTree tree;
    tree.nodes = std::move(builder.nodes);
    return tree;
}

Model train_forest(const Dataset& data, const TrainOptions& options) {
    Model m;
    m.kind = ModelKind::forest;
    m.feature_schema_version = data.schema_version;
    m.feature_dim = data.dim();
    m.seed = options.seed;
    m.trees.resize(static_cast<std::size_t>(options.forest.n_trees));

    int workers = std::max(1, options.workers);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= m.trees.size()) return;
            m.trees[i] = build_tree(data, options.forest, Rng::fork(options.seed, i));
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return m;
}

}  // namespace

int DecisionTree::predict(std::span<const double> row) const {
    std::int32_t node = 0;
    while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const TreeNode& nd = nodes[static_cast<std::size_t>(node)];
        node = row[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(node)].leaf_label;
}

double Model::predict_proba(std::span<const double> row) const {
    if (row.size() != feature_dim) {
        throw Error("feature row width " + std::to_string(row.size()) + " does not match model (" +
                    std::to_string(feature_dim) + ")");
    }
    if (kind == ModelKind::logreg) {
        double z = bias;
        for (std::size_t j = 0; j < feature_dim; ++j) {
            z += weights[j] * (row[j] - mean[j]) / stdev[j];
        }
        return sigmoid(z);
    }
    std::size_t votes = 0;
    for (const auto& tree : trees) votes += static_cast<std::size_t>(tree.predict(row));
    return static_cast<double>(votes) / static_cast<double>(trees.size());
}

Model train(const Dataset& data, ModelKind kind, const TrainOptions& options) {
    check_trainable(data);
    return kind == ModelKind::logreg ? train_logreg(data, options) : train_forest(data, options);
}

Prediction predict(const Model& model, std::span<const double> row, int schema_version) {
    if (schema_version != model.feature_schema_version) {
        throw Error("feature schema " + std::to_string(schema_version) +
                    " does not match model schema " +
                    std::to_string(model.feature_schema_version));
    }
    double p = model.predict_proba(row);
    return {p >= model.decision_threshold ? 1 : 0, p};
}

BinaryMetrics binary_metrics(std::span<const int> truth, std::span<const int> predicted) {
    BinaryMetrics m;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predicted[i] && truth[i]) ++m.tp;
        else if (predicted[i] && !truth[i]) ++m.fp;
        else if (!predicted[i] && truth[i]) ++m.fn;
        else ++m.tn;
    }
    m.precision = m.tp + m.fp == 0 ? 1.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
    m.recall = m.tp + m.fn == 0 ? 1.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                                        : 0.0;
    return m;
}

CVReport cross_validate(const Dataset& data, ModelKind kind, const TrainOptions& options, int k) {
    if (k < 2) throw Error("cross-validation needs k >= 2");
    if (data.pairs.size() < static_cast<std::size_t>(k)) {
        throw Error("not enough data for " + std::to_string(k) + " folds");
    }
    check_trainable(data);

    // Stratified assignment: shuffle each class, deal round-robin.
    std::vector<int> fold_of(data.pairs.size(), 0);
    for (int cls = 0; cls <= 1; ++cls) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < data.pairs.size(); ++i) {
            if (data.pairs[i].label == cls) members.push_back(i);
        }
        Rng rng = Rng::fork(options.seed, 1000 + static_cast<std::uint64_t>(cls));
        for (std::size_t i = members.size(); i > 1; --i) {
            std::swap(members[i - 1], members[rng.below(i)]);
        }
        for (std::size_t i = 0; i < members.size(); ++i) {
            fold_of[members[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
        }
    }

    CVReport report;
    report.folds = k;
    std::vector<int> all_truth, all_pred;
    for (int f = 0; f < k; ++f) {
        Dataset train_split{data.schema_version, data.feature_names, {}};
        std::vector<std::size_t> holdout;
        for (std::size_t i = 0; i < data.pairs.size(); ++i) {
            if (fold_of[i] == f) holdout.push_back(i);
            else train_split.pairs.push_back(data.pairs[i]);
        }
        Model model = train(train_split, kind, options);
        std::vector<int> truth, pred;
        truth.reserve(holdout.size());
        pred.reserve(holdout.size());
        for (auto i : holdout) {
            truth.push_back(data.pairs[i].label);
            pred.push_back(predict(model, data.pairs[i].features, data.schema_version).label);
        }
        report.per_fold.push_back(binary_metrics(truth, pred));
        all_truth.insert(all_truth.end(), truth.begin(), truth.end());
        all_pred.insert(all_pred.end(), pred.begin(), pred.end());
    }
    for (const auto& fm : report.per_fold) {
        report.mean_precision += fm.precision;
        report.mean_recall += fm.recall;
        report.mean_f1 += fm.f1;
    }
    report.mean_precision /= k;
    report.mean_recall /= k;
    report.mean_f1 /= k;
    report.pooled = binary_metrics(all_truth, all_pred);
    return report;
}

std::pair<TrainOptions, CVReport> grid_search(const Dataset& data, ModelKind kind,
                                              const std::vector<TrainOptions>& grid, int k) {
    if (grid.empty()) throw Error("hyperparameter grid is empty");
    std::size_t best = 0;
    CVReport best_report;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CVReport report = cross_validate(data, kind, grid[i], k);
        if (i == 0 || report.mean_f1 > best_report.mean_f1) {
            best = i;
            best_report = report;
        }
    }
    return {grid[best], best_report};
}

std::vector<TrainOptions> default_forest_grid(std::uint64_t seed) {
    std::vector<TrainOptions> grid;
    for (int trees : {50, 100, 200}) {
        for (int depth : {8, 12, 16}) {
            TrainOptions o;
            o.seed = seed;
            o.forest.n_trees = trees;
            o.forest.max_depth = depth;
            grid.push_back(o);
        }
    }
    return grid;
}

namespace {

double entropy_bits(std::size_t pos, std::size_t total) {
    if (total == 0) return 0.0;
    double h = 0.0;
    for (std::size_t count : {pos, total - pos}) {
        if (count == 0) continue;
        double p = static_cast<double>(count) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

}  // namespace

std::vector<std::pair<std::string, double>> information_gain(const Dataset& data) {
    if (data.pairs.empty()) throw Error("information gain needs data");
    std::size_t n = data.pairs.size();
    std::size_t pos = 0;
    for (const auto& p : data.pairs) pos += static_cast<std::size_t>(p.label);
    double h_label = entropy_bits(pos, n);

    std::vector<std::pair<std::string, double>> out;
    for (std::size_t f = 0; f < data.dim(); ++f) {
        std::vector<double> values(n);
        for (std::size_t i = 0; i < n; ++i) values[i] = data.pairs[i].features[f];
        std::vector<double> sorted = values;
        std::sort(sorted.begin(), sorted.end());

        // Up to 10 equal-frequency cut points; duplicates collapse.
        std::vector<double> cuts;
        for (int b = 1; b < 10; ++b) {
            double cut = sorted[n * static_cast<std::size_t>(b) / 10];
            if (cuts.empty() || cut > cuts.back()) cuts.push_back(cut);
        }
        std::size_t n_bins = cuts.size() + 1;
        std::vector<std::size_t> bin_total(n_bins, 0), bin_pos(n_bins, 0);
        for (std::size_t i = 0; i < n; ++i) {
            // A value equal to a cut lands in that cut's bin.
            std::size_t bin = static_cast<std::size_t>(
                std::lower_bound(cuts.begin(), cuts.end(), values[i]) - cuts.begin());
            ++bin_total[bin];
            bin_pos[bin] += static_cast<std::size_t>(data.pairs[i].label);
        }
        double conditional = 0.0;
        for (std::size_t b = 0; b < n_bins; ++b) {
            conditional += static_cast<double>(bin_total[b]) / static_cast<double>(n) *
                           entropy_bits(bin_pos[b], bin_total[b]);
        }
        out.emplace_back(data.feature_names[f], h_label - conditional);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

namespace {
constexpr std::uint32_t kModelFormatVersion = 1;
}

void Model::save(std::ostream& os) const {
    os.write("LFMD", 4);
    binio::write_u32(os, kModelFormatVersion);
    binio::write_u8(os, static_cast<std::uint8_t>(kind));
    binio::write_u32(os, static_cast<std::uint32_t>(feature_schema_version));
    binio::write_u64(os, feature_dim);
    binio::write_f64(os, decision_threshold);
    binio::write_u64(os, seed);
    if (kind == ModelKind::logreg) {
        for (const auto& vec : {mean, stdev, weights}) {
            for (double v : vec) binio::write_f64(os, v);
        }
        binio::write_f64(os, bias);
    } else {
        binio::write_u32(os, static_cast<std::uint32_t>(trees.size()));
        for (const auto& tree : trees) {
            binio::write_u32(os, static_cast<std::uint32_t>(tree.nodes.size()));
            for (const auto& nd : tree.nodes) {
                binio::write_u32(os, static_cast<std::uint32_t>(nd.feature));
                binio::write_f64(os, nd.threshold);
                binio::write_u32(os, static_cast<std::uint32_t>(nd.left));
                binio::write_u32(os, static_cast<std::uint32_t>(nd.right));
                binio::write_u8(os, nd.leaf_label);
            }
        }
    }
}

void Model::save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write \"" + path.string() + "\"");
    save(os);
    if (!os) throw Error("write failed for \"" + path.string() + "\"");
}

Model Model::load(std::istream& is) {
    binio::expect_magic(is, "LFMD");
    std::uint32_t version = binio::read_u32(is);
    if (version != kModelFormatVersion) {
        throw Error("unsupported model format version " + std::to_string(version));
    }
    Model m;
    m.kind = static_cast<ModelKind>(binio::read_u8(is));
    m.feature_schema_version = static_cast<int>(binio::read_u32(is));
    m.feature_dim = binio::read_u64(is);
    m.decision_threshold = binio::read_f64(is);
    m.seed = binio::read_u64(is);
    if (m.kind == ModelKind::logreg) {
        for (auto* vec : {&m.mean, &m.stdev, &m.weights}) {
            vec->resize(m.feature_dim);
            for (auto& v : *vec) v = binio::read_f64(is);
        }
        m.bias = binio::read_f64(is);
    } else {
        std::uint32_t n_trees = binio::read_u32(is);
        m.trees.resize(n_trees);
        for (auto& tree : m.trees) {
            std::uint32_t n_nodes = binio::read_u32(is);
            tree.nodes.resize(n_nodes);
            for (auto& nd : tree.nodes) {
                nd.feature = static_cast<std::int32_t>(binio::read_u32(is));
                nd.threshold = binio::read_f64(is);
                nd.left = static_cast<std::int32_t>(binio::read_u32(is));
                nd.right = static_cast<std::int32_t>(binio::read_u32(is));
                nd.leaf_label = binio::read_u8(is);
            }
        }
    }
    return m;
}

Model Model::load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open \"" + path.string() + "\"");
    return load(is);
}

}  // namespace linkforge
