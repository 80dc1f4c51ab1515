#include "signopt/mlp.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace signopt {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<const RowMat>;
using MapVec = Eigen::Map<const Eigen::VectorXd>;

inline std::uint64_t fnv1a(std::uint64_t hash, unsigned char byte) {
    return (hash ^ byte) * 1099511628211ULL;
}

} // namespace

struct Mlp::Pass {
    RowMat input;                // B x sizes[0]
    std::vector<RowMat> pre;     // pre-activations per layer
    std::vector<RowMat> post;    // activations per layer (last = logits)
};

Activation parse_activation(const std::string& name) {
    if (name == "relu") {
        return Activation::relu;
    }
    if (name == "tanh") {
        return Activation::tanh;
    }
    throw std::invalid_argument("mlp: unknown activation '" + name + "'");
}

Mlp::Mlp(std::vector<std::size_t> layer_sizes, Activation activation, const Dataset* data)
    : sizes_(std::move(layer_sizes)), act_(activation), data_(data) {
    if (sizes_.size() < 2) {
        throw std::invalid_argument("mlp: need at least two layer sizes");
    }
    for (std::size_t s : sizes_) {
        if (s == 0) {
            throw std::invalid_argument("mlp: zero layer size");
        }
    }
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        weight_offsets_.push_back(total_params_);
        total_params_ += sizes_[l] * sizes_[l + 1];
        bias_offsets_.push_back(total_params_);
        total_params_ += sizes_[l + 1];
    }
    if (data_ != nullptr &&
        (data_->num_features != sizes_.front() ||
         static_cast<std::size_t>(data_->num_classes) != sizes_.back())) {
        throw std::invalid_argument("mlp: size mismatch with data");
    }
}

std::int32_t Mlp::num_classes() const {
    return static_cast<std::int32_t>(sizes_.back());
}

std::vector<ParamGroup> Mlp::groups() const {
    std::vector<ParamGroup> out;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        const std::string tag = "fc" + std::to_string(l);
        out.push_back(ParamGroup{weight_offsets_[l], sizes_[l] * sizes_[l + 1], tag + ".weight"});
        out.push_back(ParamGroup{bias_offsets_[l], sizes_[l + 1], tag + ".bias"});
    }
    return out;
}

Vec Mlp::init_params(Rng& rng) const {
    Vec theta(total_params_, 0.0);
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        const double fan_in = static_cast<double>(sizes_[l]);
        const double fan_out = static_cast<double>(sizes_[l + 1]);
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        double* w = theta.data() + weight_offsets_[l];
        const std::size_t count = sizes_[l] * sizes_[l + 1];
        for (std::size_t i = 0; i < count; ++i) {
            w[i] = rng.uniform(-limit, limit);
        }
    }
    return theta;
}

void Mlp::forward(std::span<const double> theta, std::span<const std::int32_t> batch,
                  Pass& pass) const {
    if (data_ == nullptr) {
        throw std::logic_error("mlp: no dataset bound");
    }
    if (theta.size() != total_params_) {
        throw std::invalid_argument("mlp: theta dimension mismatch");
    }
    if (batch.empty()) {
        throw std::invalid_argument("mlp: empty batch");
    }
    const std::size_t layers = sizes_.size() - 1;
    const Eigen::Index b = static_cast<Eigen::Index>(batch.size());

    pass.input.resize(b, static_cast<Eigen::Index>(sizes_[0]));
    for (Eigen::Index r = 0; r < b; ++r) {
        const auto row = data_->row(static_cast<std::size_t>(batch[static_cast<std::size_t>(r)]));
        pass.input.row(r) = MapVec(row.data(), static_cast<Eigen::Index>(row.size()));
    }

    pass.pre.resize(layers);
    pass.post.resize(layers);
    const RowMat* h = &pass.input;
    for (std::size_t l = 0; l < layers; ++l) {
        MapMat w(theta.data() + weight_offsets_[l],
                 static_cast<Eigen::Index>(sizes_[l + 1]),
                 static_cast<Eigen::Index>(sizes_[l]));
        MapVec bias(theta.data() + bias_offsets_[l], static_cast<Eigen::Index>(sizes_[l + 1]));
        pass.pre[l].noalias() = (*h) * w.transpose();
        pass.pre[l].rowwise() += bias.transpose();
        if (l + 1 < layers) {
            if (act_ == Activation::relu) {
                pass.post[l] = pass.pre[l].cwiseMax(0.0);
            } else {
                pass.post[l] = pass.pre[l].array().tanh().matrix();
            }
        } else {
            pass.post[l] = pass.pre[l];
        }
        h = &pass.post[l];
    }
}

double Mlp::loss(std::span<const double> theta,
                 std::span<const std::int32_t> batch) const {
    Pass pass;
    forward(theta, batch, pass);
    const RowMat& scores = pass.post.back();
    double total = 0.0;
    for (Eigen::Index r = 0; r < scores.rows(); ++r) {
        const std::int32_t label = data_->labels[static_cast<std::size_t>(batch[static_cast<std::size_t>(r)])];
        if (label < 0 || label >= num_classes()) {
            throw std::invalid_argument("mlp: label out of range");
        }
        const double peak = scores.row(r).maxCoeff();
        const double z = (scores.row(r).array() - peak).exp().sum();
        total += std::log(z) - (scores(r, label) - peak);
    }
    return total / static_cast<double>(scores.rows());
}

EvalResult Mlp::eval(std::span<const double> theta,
                     std::span<const std::int32_t> batch, Rng*) const {
    Pass pass;
    forward(theta, batch, pass);
    const std::size_t layers = sizes_.size() - 1;
    const Eigen::Index b = static_cast<Eigen::Index>(batch.size());
    const double inv_b = 1.0 / static_cast<double>(b);

    // Softmax probabilities and loss from the last layer's scores.
    RowMat delta = pass.post.back();
    double total = 0.0;
    for (Eigen::Index r = 0; r < b; ++r) {
        const std::int32_t label = data_->labels[static_cast<std::size_t>(batch[static_cast<std::size_t>(r)])];
        if (label < 0 || label >= num_classes()) {
            throw std::invalid_argument("mlp: label out of range");
        }
        const double peak = delta.row(r).maxCoeff();
        delta.row(r) = (delta.row(r).array() - peak).exp();
        const double z = delta.row(r).sum();
        delta.row(r) /= z;
        total += std::log(z) - (pass.post.back()(r, label) - peak);
        delta(r, label) -= 1.0;
    }
    delta *= inv_b;

    EvalResult out;
    out.loss = total * inv_b;
    out.grad.values.assign(total_params_, 0.0);
    out.grad.batch_size = static_cast<std::int32_t>(batch.size());

    for (std::size_t l = layers; l-- > 0;) {
        const RowMat& h_prev = (l == 0) ? pass.input : pass.post[l - 1];
        Eigen::Map<RowMat> dw(out.grad.values.data() + weight_offsets_[l],
                              static_cast<Eigen::Index>(sizes_[l + 1]),
                              static_cast<Eigen::Index>(sizes_[l]));
        Eigen::Map<Eigen::VectorXd> db(out.grad.values.data() + bias_offsets_[l],
                                       static_cast<Eigen::Index>(sizes_[l + 1]));
        dw.noalias() = delta.transpose() * h_prev;
        db = delta.colwise().sum().transpose();
        if (l == 0) {
            break;
        }
        MapMat w(theta.data() + weight_offsets_[l],
                 static_cast<Eigen::Index>(sizes_[l + 1]),
                 static_cast<Eigen::Index>(sizes_[l]));
        RowMat dh = delta * w;
        if (act_ == Activation::relu) {
            delta = (pass.pre[l - 1].array() > 0.0).select(dh, 0.0);
        } else {
            delta = dh.array() * (1.0 - pass.post[l - 1].array().square());
        }
    }
    return out;
}

std::uint64_t Mlp::region_signature(std::span<const double> theta,
                                    std::span<const std::int32_t> batch) const {
    if (act_ != Activation::relu) {
        return 0;
    }
    Pass pass;
    forward(theta, batch, pass);
    std::uint64_t hash = 1469598103934665603ULL;
    const std::size_t layers = sizes_.size() - 1;
    // Hidden layers only; the logits layer has no kink.
    for (std::size_t l = 0; l + 1 < layers; ++l) {
        const RowMat& z = pass.pre[l];
        for (Eigen::Index r = 0; r < z.rows(); ++r) {
            for (Eigen::Index c = 0; c < z.cols(); ++c) {
                hash = fnv1a(hash, z(r, c) > 0.0 ? 1 : 0);
            }
        }
    }
    return hash;
}

void Mlp::logits(std::span<const double> theta, std::span<const double> x,
                 std::span<double> out) const {
    const std::size_t layers = sizes_.size() - 1;
    Eigen::VectorXd h = MapVec(x.data(), static_cast<Eigen::Index>(x.size()));
    for (std::size_t l = 0; l < layers; ++l) {
        MapMat w(theta.data() + weight_offsets_[l],
                 static_cast<Eigen::Index>(sizes_[l + 1]),
                 static_cast<Eigen::Index>(sizes_[l]));
        MapVec bias(theta.data() + bias_offsets_[l], static_cast<Eigen::Index>(sizes_[l + 1]));
        Eigen::VectorXd z = w * h + bias;
        if (l + 1 < layers) {
            if (act_ == Activation::relu) {
                h = z.cwiseMax(0.0);
            } else {
                h = z.array().tanh().matrix();
            }
        } else {
            h = z;
        }
    }
    for (std::size_t c = 0; c < sizes_.back(); ++c) {
        out[c] = h[static_cast<Eigen::Index>(c)];
    }
}

double Mlp::error_rate(std::span<const double> theta, const Dataset& ds) const {
    if (ds.size() == 0) {
        throw std::invalid_argument("error_rate: empty dataset");
    }
    if (ds.num_features != sizes_.front()) {
        throw std::invalid_argument("mlp: size mismatch with data");
    }
    const std::size_t layers = sizes_.size() - 1;
    const std::size_t chunk = 1024;
    std::size_t wrong = 0;
    RowMat h;
    for (std::size_t begin = 0; begin < ds.size(); begin += chunk) {
        const std::size_t count = std::min(chunk, ds.size() - begin);
        h.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(sizes_[0]));
        for (std::size_t r = 0; r < count; ++r) {
            const auto row = ds.row(begin + r);
            h.row(static_cast<Eigen::Index>(r)) =
                MapVec(row.data(), static_cast<Eigen::Index>(row.size()));
        }
        for (std::size_t l = 0; l < layers; ++l) {
            MapMat w(theta.data() + weight_offsets_[l],
                     static_cast<Eigen::Index>(sizes_[l + 1]),
                     static_cast<Eigen::Index>(sizes_[l]));
            MapVec bias(theta.data() + bias_offsets_[l],
                        static_cast<Eigen::Index>(sizes_[l + 1]));
            RowMat z = h * w.transpose();
            z.rowwise() += bias.transpose();
            if (l + 1 < layers) {
                if (act_ == Activation::relu) {
                    h = z.cwiseMax(0.0);
                } else {
                    h = z.array().tanh().matrix();
                }
            } else {
                h = z;
            }
        }
        for (std::size_t r = 0; r < count; ++r) {
            Eigen::Index best = 0;
            h.row(static_cast<Eigen::Index>(r)).maxCoeff(&best);
            if (static_cast<std::int32_t>(best) != ds.labels[begin + r]) {
                ++wrong;
            }
        }
    }
    return static_cast<double>(wrong) / static_cast<double>(ds.size());
}

} // namespace signopt
