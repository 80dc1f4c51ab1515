#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>

#include "signopt/confidence.hpp"
#include "signopt/objective.hpp"
#include "signopt/vec.hpp"

namespace signopt {

struct HyperParams {
    double lr = 1e-3;     // delta
    double beta1 = 0.9;   // first-moment decay (or the single momentum decay)
    double beta2 = 0.999; // second-moment decay
    double eps = 1e-8;
    double weight_decay = 5e-4; // lambda; the standard protocol default
    bool decoupled_decay = false;
    ConfidenceSpec confidence{};
    // Coefficient on the gated-gradient term in the generic framework.
    // NaN selects (1 - beta1), which makes the framework and signADAM++
    // coincide; 1.0 reproduces the framework recurrence written without
    // the (1 - beta) factor. See FrameworkOptimizer.
    double framework_grad_coeff = std::numeric_limits<double>::quiet_NaN();

    void validate() const;
};

/// Base for all update rules. Owns the moment vectors, the step counter,
/// the weight-decay policy, and checkpointing; subclasses implement one
/// in-place update. Instances are single-owner and strictly sequential.
class Optimizer {
public:
    virtual ~Optimizer() = default;

    const std::string& name() const { return name_; }
    std::size_t dim() const { return dim_; }
    std::uint64_t step_count() const { return k_; }
    double learning_rate() const { return lr_; }
    void set_learning_rate(double lr);
    const HyperParams& hyperparams() const { return hp_; }
    const std::vector<ParamGroup>& groups() const { return groups_; }

    /// One optimization step: coupled decay folds lambda*theta into the
    /// gradient first; decoupled decay shrinks parameters by
    /// lr*lambda*theta_prev after the rule's own update.
    void apply(std::span<double> theta, const GradEstimate& grad);

    /// First/second moment state; empty when the rule keeps none.
    const Vec& first_moment() const { return m_; }
    const Vec& second_moment() const { return v_; }

    /// Exponential average of gradient signs (always within [-1, 1]), or
    /// nullptr for rules that do not accumulate signs.
    virtual const Vec* sign_momentum() const { return nullptr; }

    /// Post-confidence gradient from the latest step, or nullptr when the
    /// rule has no confidence stage.
    virtual const Vec* last_processed() const { return nullptr; }

    /// Confidence factor last applied to a parameter group (0 = no gate).
    virtual double alpha_for_group(std::size_t group) const {
        (void)group;
        return 0.0;
    }

    std::string checkpoint_json() const;
    void save_checkpoint(const std::string& path) const;

protected:
    Optimizer(std::string name, HyperParams hp, std::size_t dim,
              std::vector<ParamGroup> groups);

    virtual void step(std::span<double> theta, std::span<const double> grad) = 0;

    std::string name_;
    HyperParams hp_;
    std::size_t dim_;
    std::vector<ParamGroup> groups_;
    double lr_;
    std::uint64_t k_ = 0;
    Vec m_;
    Vec v_;
    AdaptiveAlphaState alpha_state_;

    /// Resolves this step's confidence factor for a group (fixed alpha or
    /// one adaptive update) and remembers it for alpha_for_group().
    double resolve_alpha(std::size_t group, std::span<const double> grad_group);
    Vec group_alphas_;

    friend std::unique_ptr<Optimizer> load_checkpoint_json(const std::string& text);
};

/// theta -= lr * m with m <- beta1 * m + g (heavy-ball momentum).
class SgdMomentum final : public Optimizer {
public:
    SgdMomentum(HyperParams hp, std::size_t dim, std::vector<ParamGroup> groups);

protected:
    void step(std::span<double> theta, std::span<const double> grad) override;
};

/// Bias-corrected first/second moments, the standard baseline rule.
class Adam final : public Optimizer {
public:
    Adam(HyperParams hp, std::size_t dim, std::vector<ParamGroup> groups);

protected:
    void step(std::span<double> theta, std::span<const double> grad) override;
};

/// theta -= lr * sign(g).
class SignSgd final : public Optimizer {
public:
    SignSgd(HyperParams hp, std::size_t dim, std::vector<ParamGroup> groups);
    const Vec* last_processed() const override { return &processed_; }

protected:
    void step(std::span<double> theta, std::span<const double> grad) override;

private:
    Vec processed_;
};

/// theta -= lr * sign(m) with m <- beta1 * m + (1 - beta1) * g.
class Signum final : public Optimizer {
public:
    Signum(HyperParams hp, std::size_t dim, std::vector<ParamGroup> groups);

protected:
    void step(std::span<double> theta, std::span<const double> grad) override;
};

/// Sign-fed ADAM without bias correction:
///   s = sign(g)
///   m <- beta1 m + (1-beta1) s,  v <- beta2 v + (1-beta2) s.*s
///   theta -= lr * m / (sqrt(v) + eps)
class SignAdam final : public Optimizer {
public:
    SignAdam(HyperParams hp, std::size_t dim, std::vector<ParamGroup> groups);
    const Vec* sign_momentum() const override { return &m_; }
    const Vec* last_processed() const override { return &processed_; }

protected:
    void step(std::span<double> theta, std::span<const double> grad) override;

private:
    Vec processed_;
};

/// Confidence-gated sign momentum:
///   s = hard_threshold_sign(g, alpha_k)
///   m <- beta1 m + (1-beta1) s
///   theta -= lr * m
/// alpha_k is fixed or tracked adaptively per parameter group.
class SignAdamPP final : public Optimizer {
public:
    SignAdamPP(HyperParams hp, std::size_t dim, std::vector<ParamGroup> groups);
    const Vec* sign_momentum() const override { return &m_; }
    const Vec* last_processed() const override { return &processed_; }
    double alpha_for_group(std::size_t group) const override;

protected:
    void step(std::span<double> theta, std::span<const double> grad) override;

private:
    Vec processed_;
};

/// The generic confidence-function rule:
///   m <- beta1 m + c * t,  theta -= lr * m
/// where lr * t is the confidence-weighted gradient F_conf(alpha, g) .* g
/// (t = hard_threshold_sign(g, alpha) for the canonical gate) and c is
/// hyperparams.framework_grad_coeff, (1 - beta1) by default.
class FrameworkOptimizer final : public Optimizer {
public:
    using Transform = std::function<Vec(std::span<const double>)>;

    FrameworkOptimizer(HyperParams hp, std::size_t dim, std::vector<ParamGroup> groups);
    /// Replaces the canonical gate with an arbitrary sign-domain
    /// transform (e.g. the all-zero confidence function).
    void set_transform(Transform t) { transform_ = std::move(t); }

    const Vec* sign_momentum() const override { return &m_; }
    const Vec* last_processed() const override { return &processed_; }
    double alpha_for_group(std::size_t group) const override;

protected:
    void step(std::span<double> theta, std::span<const double> grad) override;

private:
    Vec processed_;
    Transform transform_;
};

/// Factory keyed by rule name: sgd, adam, signsgd, signum, signadam,
/// signadampp, framework.
std::unique_ptr<Optimizer> make_optimizer(const std::string& name, HyperParams hp,
                                          std::size_t dim, std::vector<ParamGroup> groups);
const std::vector<std::string>& optimizer_names();

/// Step-decay schedule: lr is multiplied by `factor` once for every
/// milestone epoch <= epoch.
double lr_schedule(std::int64_t epoch, double base_lr,
                   const std::vector<std::int64_t>& milestones, double factor);

/// Rebuilds an optimizer, bit-exactly, from checkpoint_json() output.
std::unique_ptr<Optimizer> load_checkpoint_json(const std::string& text);
std::unique_ptr<Optimizer> load_checkpoint(const std::string& path);

} // namespace signopt
