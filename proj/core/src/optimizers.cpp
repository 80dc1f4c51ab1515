#include "signopt/optimizers.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace signopt {

namespace {

inline double sign_of(double x) {
    return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
}

} // namespace

void HyperParams::validate() const {
    if (!(lr > 0.0)) {
        throw std::invalid_argument("hyperparams: lr must be positive");
    }
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw std::invalid_argument("hyperparams: decay rates must be in [0, 1)");
    }
    // eps = 0 is allowed; the ADAM -> SIGN-SGD reduction depends on it.
    if (eps < 0.0) {
        throw std::invalid_argument("hyperparams: eps must be >= 0");
    }
    if (weight_decay < 0.0) {
        throw std::invalid_argument("hyperparams: weight_decay must be >= 0");
    }
    confidence.validate();
}

Optimizer::Optimizer(std::string name, HyperParams hp, std::size_t dim,
                     std::vector<ParamGroup> groups)
    : name_(std::move(name)), hp_(hp), dim_(dim), groups_(std::move(groups)), lr_(hp.lr) {
    hp_.validate();
    if (dim_ == 0) {
        throw std::invalid_argument("optimizer: zero dimension");
    }
    if (groups_.empty()) {
        groups_ = whole_vector_group(dim_);
    }
    ParamVector layout{Vec(dim_, 0.0), groups_};
    layout.validate();
    alpha_state_.m.assign(groups_.size(), 0.0);
    group_alphas_.assign(groups_.size(), 0.0);
}

void Optimizer::set_learning_rate(double lr) {
    if (!(lr > 0.0)) {
        throw std::invalid_argument("optimizer: lr must be positive");
    }
    lr_ = lr;
}

void Optimizer::apply(std::span<double> theta, const GradEstimate& grad) {
    if (theta.size() != dim_ || grad.values.size() != dim_) {
        throw std::invalid_argument("optimizer: shape mismatch");
    }
    require_finite(grad.values);

    const double lambda = hp_.weight_decay;
    const Vec* g = &grad.values;
    Vec coupled;
    Vec decay;
    if (lambda > 0.0) {
        if (hp_.decoupled_decay) {
            decay.resize(dim_);
            for (std::size_t i = 0; i < dim_; ++i) {
                decay[i] = lr_ * lambda * theta[i];
            }
        } else {
            coupled.resize(dim_);
            for (std::size_t i = 0; i < dim_; ++i) {
                coupled[i] = grad.values[i] + lambda * theta[i];
            }
            g = &coupled;
        }
    }

    ++k_;
    step(theta, *g);

    if (!decay.empty()) {
        for (std::size_t i = 0; i < dim_; ++i) {
            theta[i] -= decay[i];
        }
    }
}

double Optimizer::resolve_alpha(std::size_t group, std::span<const double> grad_group) {
    const ConfidenceSpec& spec = hp_.confidence;
    double alpha = 0.0;
    switch (spec.kind) {
    case ConfidenceKind::none:
        alpha = 0.0;
        break;
    case ConfidenceKind::fixed:
        alpha = spec.alpha;
        break;
    case ConfidenceKind::adaptive:
        alpha = adaptive_alpha_step(alpha_state_.m[group], grad_group, spec.beta1, spec.beta2);
        break;
    }
    group_alphas_[group] = alpha;
    return alpha;
}

// ---------------------------------------------------------------------------

SgdMomentum::SgdMomentum(HyperParams hp, std::size_t dim, std::vector<ParamGroup> groups)
    : Optimizer("sgd", hp, dim, std::move(groups)) {
    m_.assign(dim_, 0.0);
}

void SgdMomentum::step(std::span<double> theta, std::span<const double> g) {
    const double mu = hp_.beta1;
    for (std::size_t i = 0; i < dim_; ++i) {
        m_[i] = mu * m_[i] + g[i];
        theta[i] -= lr_ * m_[i];
    }
}

Adam::Adam(HyperParams hp, std::size_t dim, std::vector<ParamGroup> groups)
    : Optimizer("adam", hp, dim, std::move(groups)) {
    m_.assign(dim_, 0.0);
    v_.assign(dim_, 0.0);
}

void Adam::step(std::span<double> theta, std::span<const double> g) {
    const double b1 = hp_.beta1;
    const double b2 = hp_.beta2;
    const double c1 = 1.0 - b1;
    const double c2 = 1.0 - b2;
    const double bias1 = 1.0 - std::pow(b1, static_cast<double>(k_));
    const double bias2 = 1.0 - std::pow(b2, static_cast<double>(k_));
    for (std::size_t i = 0; i < dim_; ++i) {
        m_[i] = b1 * m_[i] + c1 * g[i];
        v_[i] = b2 * v_[i] + c2 * (g[i] * g[i]);
        const double m_hat = m_[i] / bias1;
        const double v_hat = v_[i] / bias2;
        theta[i] -= lr_ * (m_hat / (std::sqrt(v_hat) + hp_.eps));
    }
}

SignSgd::SignSgd(HyperParams hp, std::size_t dim, std::vector<ParamGroup> groups)
    : Optimizer("signsgd", hp, dim, std::move(groups)), processed_(dim_, 0.0) {}

void SignSgd::step(std::span<double> theta, std::span<const double> g) {
    for (std::size_t i = 0; i < dim_; ++i) {
        const double s = sign_of(g[i]);
        processed_[i] = s;
        theta[i] -= lr_ * s;
    }
}

Signum::Signum(HyperParams hp, std::size_t dim, std::vector<ParamGroup> groups)
    : Optimizer("signum", hp, dim, std::move(groups)) {
    m_.assign(dim_, 0.0);
}

void Signum::step(std::span<double> theta, std::span<const double> g) {
    const double b1 = hp_.beta1;
    const double c1 = 1.0 - b1;
    for (std::size_t i = 0; i < dim_; ++i) {
        m_[i] = b1 * m_[i] + c1 * g[i];
        theta[i] -= lr_ * sign_of(m_[i]);
    }
}

SignAdam::SignAdam(HyperParams hp, std::size_t dim, std::vector<ParamGroup> groups)
    : Optimizer("signadam", hp, dim, std::move(groups)), processed_(dim_, 0.0) {
    m_.assign(dim_, 0.0);
    v_.assign(dim_, 0.0);
}

void SignAdam::step(std::span<double> theta, std::span<const double> g) {
    const double b1 = hp_.beta1;
    const double b2 = hp_.beta2;
    const double c1 = 1.0 - b1;
    const double c2 = 1.0 - b2;
    for (std::size_t i = 0; i < dim_; ++i) {
        const double s = sign_of(g[i]);
        processed_[i] = s;
        m_[i] = b1 * m_[i] + c1 * s;
        v_[i] = b2 * v_[i] + c2 * (s * s);
        theta[i] -= lr_ * (m_[i] / (std::sqrt(v_[i]) + hp_.eps));
    }
}

SignAdamPP::SignAdamPP(HyperParams hp, std::size_t dim, std::vector<ParamGroup> groups)
    : Optimizer("signadampp", hp, dim, std::move(groups)), processed_(dim_, 0.0) {
    m_.assign(dim_, 0.0);
}

double SignAdamPP::alpha_for_group(std::size_t group) const {
    return group_alphas_.at(group);
}

void SignAdamPP::step(std::span<double> theta, std::span<const double> g) {
    const double b1 = hp_.beta1;
    const double c1 = 1.0 - b1;
    for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
        const ParamGroup& grp = groups_[gi];
        const auto gg = g.subspan(grp.offset, grp.length);
        const double alpha = resolve_alpha(gi, gg);
        for (std::size_t j = 0; j < grp.length; ++j) {
            const std::size_t i = grp.offset + j;
            const double s = confidence_gated(g[i], alpha) ? 0.0 : (g[i] > 0.0 ? 1.0 : -1.0);
            processed_[i] = s;
            m_[i] = b1 * m_[i] + c1 * s;
            theta[i] -= lr_ * m_[i];
        }
    }
}

FrameworkOptimizer::FrameworkOptimizer(HyperParams hp, std::size_t dim,
                                       std::vector<ParamGroup> groups)
    : Optimizer("framework", hp, dim, std::move(groups)), processed_(dim_, 0.0) {
    m_.assign(dim_, 0.0);
}

double FrameworkOptimizer::alpha_for_group(std::size_t group) const {
    return group_alphas_.at(group);
}

void FrameworkOptimizer::step(std::span<double> theta, std::span<const double> g) {
    const double b1 = hp_.beta1;
    const double coeff = std::isnan(hp_.framework_grad_coeff) ? (1.0 - b1)
                                                              : hp_.framework_grad_coeff;
    if (transform_) {
        const Vec t = transform_(g);
        if (t.size() != dim_) {
            throw std::invalid_argument("framework: transform output dimension mismatch");
        }
        for (std::size_t i = 0; i < dim_; ++i) {
            processed_[i] = t[i];
            m_[i] = b1 * m_[i] + coeff * t[i];
            theta[i] -= lr_ * m_[i];
        }
        return;
    }
    for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
        const ParamGroup& grp = groups_[gi];
        const auto gg = g.subspan(grp.offset, grp.length);
        const double alpha = resolve_alpha(gi, gg);
        for (std::size_t j = 0; j < grp.length; ++j) {
            const std::size_t i = grp.offset + j;
            const double s = confidence_gated(g[i], alpha) ? 0.0 : (g[i] > 0.0 ? 1.0 : -1.0);
            processed_[i] = s;
            m_[i] = b1 * m_[i] + coeff * s;
            theta[i] -= lr_ * m_[i];
        }
    }
}

// ---------------------------------------------------------------------------

std::unique_ptr<Optimizer> make_optimizer(const std::string& name, HyperParams hp,
                                          std::size_t dim, std::vector<ParamGroup> groups) {
    if (name == "sgd") {
        return std::make_unique<SgdMomentum>(hp, dim, std::move(groups));
    }
    if (name == "adam") {
        return std::make_unique<Adam>(hp, dim, std::move(groups));
    }
    if (name == "signsgd") {
        return std::make_unique<SignSgd>(hp, dim, std::move(groups));
    }
    if (name == "signum") {
        return std::make_unique<Signum>(hp, dim, std::move(groups));
    }
    if (name == "signadam") {
        return std::make_unique<SignAdam>(hp, dim, std::move(groups));
    }
    if (name == "signadampp") {
        return std::make_unique<SignAdamPP>(hp, dim, std::move(groups));
    }
    if (name == "framework") {
        return std::make_unique<FrameworkOptimizer>(hp, dim, std::move(groups));
    }
    throw std::invalid_argument("unknown optimizer '" + name + "'");
}

const std::vector<std::string>& optimizer_names() {
    static const std::vector<std::string> names = {
        "sgd", "adam", "signsgd", "signum", "signadam", "signadampp", "framework"};
    return names;
}

double lr_schedule(std::int64_t epoch, double base_lr,
                   const std::vector<std::int64_t>& milestones, double factor) {
    if (!(factor > 0.0 && factor <= 1.0)) {
        throw std::invalid_argument("lr_schedule: factor must be in (0, 1]");
    }
    double lr = base_lr;
    for (std::int64_t milestone : milestones) {
        if (epoch >= milestone) {
            lr *= factor;
        }
    }
    return lr;
}

// --------------------------- checkpointing --------------------------------

std::string Optimizer::checkpoint_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["algo"] = name_;
    j["dim"] = dim_;
    j["k"] = k_;
    j["lr"] = lr_;
    nlohmann::json hp;
    hp["lr"] = hp_.lr;
    hp["beta1"] = hp_.beta1;
    hp["beta2"] = hp_.beta2;
    hp["eps"] = hp_.eps;
    hp["weight_decay"] = hp_.weight_decay;
    hp["decoupled_decay"] = hp_.decoupled_decay;
    if (!std::isnan(hp_.framework_grad_coeff)) {
        hp["framework_grad_coeff"] = hp_.framework_grad_coeff;
    }
    nlohmann::json conf;
    switch (hp_.confidence.kind) {
    case ConfidenceKind::none:
        conf["kind"] = "none";
        break;
    case ConfidenceKind::fixed:
        conf["kind"] = "fixed";
        conf["alpha"] = hp_.confidence.alpha;
        break;
    case ConfidenceKind::adaptive:
        conf["kind"] = "adaptive";
        conf["beta1"] = hp_.confidence.beta1;
        conf["beta2"] = hp_.confidence.beta2;
        break;
    }
    hp["confidence"] = conf;
    j["hyperparams"] = hp;
    nlohmann::json groups = nlohmann::json::array();
    for (const ParamGroup& g : groups_) {
        groups.push_back({{"offset", g.offset}, {"length", g.length}, {"name", g.name}});
    }
    j["groups"] = groups;
    j["m"] = m_;
    j["v"] = v_;
    j["alpha_m"] = alpha_state_.m;
    j["alpha_t"] = alpha_state_.t;
    return j.dump();
}

void Optimizer::save_checkpoint(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
    }
    out << checkpoint_json() << '\n';
}

std::unique_ptr<Optimizer> load_checkpoint_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("version").get<int>() != 1) {
        throw std::runtime_error("checkpoint: unsupported version");
    }
    const nlohmann::json& hpj = j.at("hyperparams");
    HyperParams hp;
    hp.lr = hpj.at("lr").get<double>();
    hp.beta1 = hpj.at("beta1").get<double>();
    hp.beta2 = hpj.at("beta2").get<double>();
    hp.eps = hpj.at("eps").get<double>();
    hp.weight_decay = hpj.at("weight_decay").get<double>();
    hp.decoupled_decay = hpj.at("decoupled_decay").get<bool>();
    if (hpj.contains("framework_grad_coeff")) {
        hp.framework_grad_coeff = hpj.at("framework_grad_coeff").get<double>();
    }
    const nlohmann::json& conf = hpj.at("confidence");
    const std::string kind = conf.at("kind").get<std::string>();
    if (kind == "fixed") {
        hp.confidence.kind = ConfidenceKind::fixed;
        hp.confidence.alpha = conf.at("alpha").get<double>();
    } else if (kind == "adaptive") {
        hp.confidence.kind = ConfidenceKind::adaptive;
        hp.confidence.beta1 = conf.at("beta1").get<double>();
        hp.confidence.beta2 = conf.at("beta2").get<double>();
    } else {
        hp.confidence.kind = ConfidenceKind::none;
    }
    std::vector<ParamGroup> groups;
    for (const nlohmann::json& g : j.at("groups")) {
        groups.push_back(ParamGroup{g.at("offset").get<std::size_t>(),
                                    g.at("length").get<std::size_t>(),
                                    g.at("name").get<std::string>()});
    }
    auto opt = make_optimizer(j.at("algo").get<std::string>(), hp,
                              j.at("dim").get<std::size_t>(), std::move(groups));
    opt->lr_ = j.at("lr").get<double>();
    opt->k_ = j.at("k").get<std::uint64_t>();
    opt->m_ = j.at("m").get<Vec>();
    opt->v_ = j.at("v").get<Vec>();
    opt->alpha_state_.m = j.at("alpha_m").get<Vec>();
    opt->alpha_state_.t = j.at("alpha_t").get<std::uint64_t>();
    if ((!opt->m_.empty() && opt->m_.size() != opt->dim_) ||
        (!opt->v_.empty() && opt->v_.size() != opt->dim_)) {
        throw std::runtime_error("checkpoint: state dimension mismatch");
    }
    return opt;
}

std::unique_ptr<Optimizer> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("checkpoint: cannot open " + path);
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_checkpoint_json(text);
}

} // namespace signopt
