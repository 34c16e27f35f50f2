#include "jwkbfit/potentials.hpp"

#include <cmath>

#include "jwkbfit/numerics.hpp"

namespace jwkbfit {

PotentialSpec PotentialSpec::harmonic_complex(cplx c) {
    PotentialSpec s;
    s.kind = PotentialKind::HarmonicComplex;
    s.c = c;
    return s;
}

PotentialSpec PotentialSpec::gaussian_bump(double b, cplx c) {
    PotentialSpec s;
    s.kind = PotentialKind::GaussianBump;
    s.b = b;
    s.c = c;
    return s;
}

PotentialSpec PotentialSpec::double_gaussian(double alpha, double beta, double gamma, cplx c) {
    PotentialSpec s;
    s.kind = PotentialKind::DoubleGaussian;
    s.alpha = alpha;
    s.beta = beta;
    s.gamma = gamma;
    s.c = c;
    return s;
}

void PotentialSpec::validate() const {
    if (c == cplx(0.0, 0.0) || !(c.real() > 0.0))
        throw DomainError("PotentialSpec: need c != 0 with Re c > 0");
    if (kind == PotentialKind::GaussianBump && !(b > 0.0))
        throw DomainError("PotentialSpec: need b > 0");
    if (kind == PotentialKind::DoubleGaussian &&
        (!(alpha > 0.0) || !(beta > 0.0) || !(gamma > 0.0)))
        throw DomainError("PotentialSpec: need alpha, beta, gamma > 0");
}

cplx eval_potential(const PotentialSpec& s, cplx x) {
    switch (s.kind) {
        case PotentialKind::HarmonicComplex: {
            const cplx u = s.c * x;
            return u * u;
        }
        case PotentialKind::GaussianBump:
            return x * x * std::exp(-x * x / (s.b * s.b));
        case PotentialKind::DoubleGaussian: {
            const cplx dm = x - s.beta, dp = x + s.beta;
            return s.alpha * (std::exp(-s.gamma * dm * dm) + std::exp(-s.gamma * dp * dp));
        }
    }
    throw DomainError("eval_potential: unknown potential kind");
}

cplx eval_potential(const PotentialSpec& s, double x) { return eval_potential(s, cplx(x, 0.0)); }

cplx potential_derivative(const PotentialSpec& s, cplx x) {
    switch (s.kind) {
        case PotentialKind::HarmonicComplex:
            return 2.0 * s.c * s.c * x;
        case PotentialKind::GaussianBump: {
            const double b2 = s.b * s.b;
            return 2.0 * x * (1.0 - x * x / b2) * std::exp(-x * x / b2);
        }
        case PotentialKind::DoubleGaussian: {
            const cplx dm = x - s.beta, dp = x + s.beta;
            return -2.0 * s.gamma * s.alpha *
                   (dm * std::exp(-s.gamma * dm * dm) + dp * std::exp(-s.gamma * dp * dp));
        }
    }
    throw DomainError("potential_derivative: unknown potential kind");
}

cplx potential_second_derivative(const PotentialSpec& s, cplx x) {
    switch (s.kind) {
        case PotentialKind::HarmonicComplex:
            return 2.0 * s.c * s.c;
        case PotentialKind::GaussianBump: {
            const double b2 = s.b * s.b;
            const cplx x2 = x * x;
            return (2.0 - 10.0 * x2 / b2 + 4.0 * x2 * x2 / (b2 * b2)) * std::exp(-x2 / b2);
        }
        case PotentialKind::DoubleGaussian: {
            const cplx dm = x - s.beta, dp = x + s.beta;
            const double g = s.gamma;
            return -2.0 * g * s.alpha *
                   ((1.0 - 2.0 * g * dm * dm) * std::exp(-g * dm * dm) +
                    (1.0 - 2.0 * g * dp * dp) * std::exp(-g * dp * dp));
        }
    }
    throw DomainError("potential_second_derivative: unknown potential kind");
}

WorkingProblem to_working_problem(const PotentialSpec& spec, double X) {
    spec.validate();
    if (!(X > 0.0)) throw DomainError("to_working_problem: need X > 0");

    WorkingProblem w;
    w.truncation_radius = X;
    if (spec.kind == PotentialKind::HarmonicComplex) {
        const cplx c = spec.c;
        w.eigen_scale = cplx(1.0, 0.0);
        w.potential_eval = [c](double x) {
            const cplx u = c * x;
            return u * u;
        };
        w.potential_deriv = [c](double x) { return 2.0 * c * c * x; };
        w.potential_deriv2 = [c](double) { return 2.0 * c * c; };
    } else {
        const PotentialSpec s = spec;
        const cplx c = spec.c;
        const cplx rc = std::sqrt(spec.c);
        w.eigen_scale = c;
        w.potential_eval = [s, c, rc](double x) { return c * eval_potential(s, rc * x); };
        w.potential_deriv = [s, c, rc](double x) {
            return c * rc * potential_derivative(s, rc * x);
        };
        w.potential_deriv2 = [s, c, rc](double x) {
            return c * c * potential_second_derivative(s, rc * x);
        };
    }
    return w;
}

WorkingProblem blend_working_problem(const PotentialSpec& target, double t, double X) {
    target.validate();
    if (target.kind == PotentialKind::HarmonicComplex)
        throw DomainError("blend_working_problem: target must be a Gaussian family");
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("blend_working_problem: need t in [0, 1]");
    if (!(X > 0.0)) throw DomainError("blend_working_problem: need X > 0");

    const PotentialSpec s = target;
    const cplx c = target.c;
    const cplx rc = std::sqrt(target.c);
    WorkingProblem w;
    w.truncation_radius = X;
    w.eigen_scale = c;
    w.potential_eval = [s, c, rc, t](double x) {
        const cplx y = rc * x;
        return c * ((1.0 - t) * y * y + t * eval_potential(s, y));
    };
    w.potential_deriv = [s, c, rc, t](double x) {
        const cplx y = rc * x;
        return c * rc * ((1.0 - t) * 2.0 * y + t * potential_derivative(s, y));
    };
    w.potential_deriv2 = [s, c, rc, t](double x) {
        const cplx y = rc * x;
        return c * c * ((1.0 - t) * 2.0 + t * potential_second_derivative(s, y));
    };
    return w;
}

double potential_distance(const PotentialSpec& a, const PotentialSpec& b, double domain_radius) {
    a.validate();
    b.validate();
    if (!(domain_radius > 0.0)) throw DomainError("potential_distance: need R > 0");
    auto num = [&](double x) { return std::norm(eval_potential(a, x) - eval_potential(b, x)); };
    auto den = [&](double x) { return std::norm(eval_potential(a, x)); };
    const double d2 = adaptive_simpson(num, -domain_radius, domain_radius, 1e-8);
    const double n2 = adaptive_simpson(den, -domain_radius, domain_radius, 1e-8);
    if (!(n2 > 0.0)) throw DomainError("potential_distance: reference potential has zero norm");
    return std::sqrt(std::max(0.0, d2) / n2);
}

double potential_distance(const std::function<double(double)>& va,
                          const std::function<double(double)>& vb, double domain_radius) {
    if (!(domain_radius > 0.0)) throw DomainError("potential_distance: need R > 0");
    auto num = [&](double x) {
        const double d = va(x) - vb(x);
        return d * d;
    };
    auto den = [&](double x) {
        const double v = va(x);
        return v * v;
    };
    const double d2 = adaptive_simpson(num, -domain_radius, domain_radius, 1e-8);
    const double n2 = adaptive_simpson(den, -domain_radius, domain_radius, 1e-8);
    if (!(n2 > 0.0)) throw DomainError("potential_distance: reference potential has zero norm");
    return std::sqrt(std::max(0.0, d2) / n2);
}

}  // namespace jwkbfit
