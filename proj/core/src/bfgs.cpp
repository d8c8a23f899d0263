#include "qcmps/bfgs.hpp"

#include "qcmps/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace qcmps {

namespace {

struct LinePoint {
    double alpha = 0.0;
    double value = 0.0;
    double slope = 0.0;
    Eigen::VectorXd grad;
    bool has_grad = false;
};

class LineSearch {
public:
    LineSearch(const ObjectiveFunction& f, const Eigen::VectorXd& x, const Eigen::VectorXd& dir,
               const BfgsOptions& opt, BfgsResult& stats)
        : f_(f), x_(x), dir_(dir), opt_(opt), stats_(stats) {}

    // Returns the accepted point, or nullopt if no point with sufficient
    // decrease was found within the evaluation budget.
    std::optional<LinePoint> run(double value0, double slope0, double alpha1) {
        value0_ = value0;
        slope0_ = slope0;
        LinePoint prev{0.0, value0, slope0, {}, false};
        double alpha = alpha1;
        for (std::size_t i = 0; i < opt_.max_line_search; ++i) {
            LinePoint cur = value_at(alpha);
            if (!armijo(cur) || (i > 0 && cur.value >= prev.value))
                return zoom(prev, cur);
            with_grad(cur);
            if (std::abs(cur.slope) <= -opt_.c2 * slope0_)
                return cur;
            if (cur.slope >= 0.0)
                return zoom(cur, prev);
            prev = std::move(cur);
            alpha *= 2.0;
        }
        return best_;
    }

private:
    bool armijo(const LinePoint& p) const {
        if (!std::isfinite(p.value))
            return false;
        // Near a minimum the required decrease falls below rounding in f, so a
        // value within a few ulps of the start also passes; the curvature test decides.
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(value0_));
        return p.value <= value0_ + opt_.c1 * p.alpha * slope0_ || p.value <= value0_ + noise;
    }

    LinePoint value_at(double alpha) {
        LinePoint p;
        p.alpha = alpha;
        p.value = f_(x_ + alpha * dir_, nullptr);
        ++stats_.evaluations;
        return p;
    }

    void with_grad(LinePoint& p) {
        if (p.has_grad)
            return;
        p.grad.resize(x_.size());
        p.value = f_(x_ + p.alpha * dir_, &p.grad);
        ++stats_.evaluations;
        ++stats_.gradient_evaluations;
        p.slope = p.grad.dot(dir_);
        p.has_grad = true;
        if (armijo(p) && (!best_ || p.value < best_->value))
            best_ = p;
    }

    std::optional<LinePoint> zoom(LinePoint lo, LinePoint hi) {
        for (std::size_t j = 0; j < opt_.max_line_search; ++j) {
            const double a = lo.alpha;
            const double b = hi.alpha;
            const double width = b - a;
            double trial = 0.5 * (a + b);
            // Quadratic through (lo.value, lo.slope) and hi.value when lo has a slope.
            if (lo.alpha == 0.0 || lo.has_grad) {
                const double slope_lo = lo.alpha == 0.0 ? slope0_ : lo.slope;
                const double denom = 2.0 * (hi.value - lo.value - slope_lo * width);
                if (std::isfinite(hi.value) && denom > 0.0) {
                    const double q = a - slope_lo * width * width / denom;
                    const double lo_edge = std::min(a, b) + 0.1 * std::abs(width);
                    const double hi_edge = std::max(a, b) - 0.1 * std::abs(width);
                    trial = std::clamp(q, lo_edge, hi_edge);
                }
            }
            LinePoint cur = value_at(trial);
            if (!armijo(cur) || cur.value >= lo.value) {
                hi = std::move(cur);
                continue;
            }
            with_grad(cur);
            if (std::abs(cur.slope) <= -opt_.c2 * slope0_)
                return cur;
            if (cur.slope * (hi.alpha - lo.alpha) >= 0.0)
                hi = lo;
            lo = std::move(cur);
        }
        return best_;
    }

    const ObjectiveFunction& f_;
    const Eigen::VectorXd& x_;
    const Eigen::VectorXd& dir_;
    const BfgsOptions& opt_;
    BfgsResult& stats_;
    double value0_ = 0.0;
    double slope0_ = 0.0;
    std::optional<LinePoint> best_;
};

} // namespace

std::string to_string(BfgsStop reason) {
    switch (reason) {
    case BfgsStop::gradient: return "gradient";
    case BfgsStop::energy: return "energy";
    case BfgsStop::max_iter: return "max_iter";
    case BfgsStop::line_search: return "line_search";
    }
    return "unknown";
}

BfgsResult minimize_bfgs(const ObjectiveFunction& f, Eigen::VectorXd x0, const BfgsOptions& opt,
                         const IterateCallback& on_iterate) {
    require(opt.c1 > 0.0 && opt.c1 < opt.c2 && opt.c2 < 1.0, "line search needs 0 < c1 < c2 < 1");
    const Eigen::Index n = x0.size();
    BfgsResult result;
    result.x = std::move(x0);
    result.grad.resize(n);
    result.value = f(result.x, &result.grad);
    ++result.evaluations;
    ++result.gradient_evaluations;
    if (!std::isfinite(result.value))
        throw NumericalError("objective is not finite at the starting point");

    auto record = [&](std::size_t iteration) {
        BfgsIterate it{iteration, result.value, n > 0 ? result.grad.cwiseAbs().maxCoeff() : 0.0};
        result.trace.push_back(it);
        if (on_iterate)
            on_iterate(it, result.x);
        return it;
    };
    BfgsIterate last = record(0);
    if (last.grad_norm < opt.grad_tol) {
        result.reason = BfgsStop::gradient;
        return result;
    }

    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
    bool scaled = false;
    result.reason = BfgsStop::max_iter;
    for (std::size_t k = 1; k <= opt.max_iter; ++k) {
        Eigen::VectorXd dir = -h_inv * result.grad;
        double slope = result.grad.dot(dir);
        if (!(slope < 0.0)) {
            // Lost descent; fall back to steepest descent with a fresh model.
            h_inv.setIdentity();
            scaled = false;
            dir = -result.grad;
            slope = result.grad.dot(dir);
        }
        const double alpha1 = scaled ? 1.0 : std::min(1.0, 1.0 / std::max(1e-12, result.grad.cwiseAbs().maxCoeff()));

        LineSearch search(f, result.x, dir, opt, result);
        auto step = search.run(result.value, slope, alpha1);
        if (!step) {
            result.reason = BfgsStop::line_search;
            break;
        }
        const Eigen::VectorXd s = step->alpha * dir;
        const Eigen::VectorXd y = step->grad - result.grad;
        const double previous = result.value;
        result.x += s;
        result.value = step->value;
        result.grad = step->grad;

        const double sy = s.dot(y);
        if (sy > 0.0) {
            if (!scaled) {
                h_inv *= sy / y.squaredNorm();
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const Eigen::VectorXd hy = h_inv * y;
            const double yhy = y.dot(hy);
            h_inv += ((1.0 + rho * yhy) * rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
        }

        last = record(k);
        if (last.grad_norm < opt.grad_tol) {
            result.reason = BfgsStop::gradient;
            break;
        }
        if (std::abs(previous - result.value) < opt.energy_tol) {
            result.reason = BfgsStop::energy;
            break;
        }
    }
    return result;
}

} // namespace qcmps
