#include "crawlq/arrivals.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crawlq/error.hpp"

namespace crawlq {

using linalg::Index;
using linalg::Matrix;
using linalg::RowVector;
using linalg::Vector;

namespace {

std::string num(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

std::string at(const std::string& label, int k, Index r, Index c) {
    return label + "_" + std::to_string(k) + "[" + std::to_string(r) + "][" + std::to_string(c) + "]";
}

bool irreducible(const Matrix& gen) {
    const Index n = gen.rows();
    auto reach = [&](bool forward) {
        std::vector<bool> seen(n, false);
        std::vector<Index> stack{0};
        seen[0] = true;
        while (!stack.empty()) {
            const Index v = stack.back();
            stack.pop_back();
            for (Index w = 0; w < n; ++w) {
                const double rate = forward ? gen(v, w) : gen(w, v);
                if (w != v && rate > 0.0 && !seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
    };
    return reach(true) && reach(false);
}

void check_shapes(const std::vector<Matrix>& d, const std::string& label) {
    if (d.empty()) throw ValidationError({label + ": no matrices given"});
    const Index n = d.front().rows();
    if (n == 0) throw ValidationError({label + ": empty matrices"});
    std::vector<std::string> issues;
    for (size_t k = 0; k < d.size(); ++k) {
        if (d[k].rows() != n || d[k].cols() != n) {
            issues.push_back(label + "_" + std::to_string(k) + " is " + std::to_string(d[k].rows()) + "x" +
                             std::to_string(d[k].cols()) + ", expected " + std::to_string(n) + "x" +
                             std::to_string(n));
        } else if (!d[k].allFinite()) {
            issues.push_back(label + "_" + std::to_string(k) + " has non-finite entries");
        }
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

std::vector<std::string> strict_issues(const std::vector<Matrix>& d, const std::string& label, double tol) {
    std::vector<std::string> issues;
    const Index n = d.front().rows();
    Matrix gen = Matrix::Zero(n, n);
    for (const auto& m : d) gen += m;
    for (size_t k = 0; k < d.size(); ++k) {
        for (Index r = 0; r < n; ++r) {
            for (Index c = 0; c < n; ++c) {
                const double x = d[k](r, c);
                if (k == 0 && r == c) {
                    if (!(x < 0.0)) issues.push_back(at(label, 0, r, c) + " = " + num(x) + ": diagonal must be negative");
                } else if (x < -tol) {
                    issues.push_back(at(label, static_cast<int>(k), r, c) + " = " + num(x) + ": negative rate");
                }
            }
        }
    }
    for (Index r = 0; r < n; ++r) {
        const double s = gen.row(r).sum();
        if (std::abs(s) > tol) {
            issues.push_back(label + "(1) row " + std::to_string(r) + " sums to " + num(s) + ", expected 0");
        }
    }
    bool any_batch = false;
    for (size_t k = 1; k < d.size(); ++k) any_batch = any_batch || d[k].maxCoeff() > 0.0;
    if (!any_batch) issues.push_back(label + ": no batch matrix has a positive entry (no arrivals)");
    if (issues.empty() && !irreducible(gen)) issues.push_back(label + "(1) is not irreducible");
    return issues;
}

}  // namespace

std::string Repair::describe() const {
    std::ostringstream os;
    os.precision(10);
    os << "D_" << matrix << "[" << row << "][" << col << "]: " << before << " -> " << after << " (" << reason << ")";
    return os.str();
}

BatchProcess::BatchProcess(std::vector<Matrix> d) : d_(std::move(d)) {
    const Index n = d_.front().rows();
    generator_ = Matrix::Zero(n, n);
    for (const auto& m : d_) generator_ += m;
    zero_ = Matrix::Zero(n, n);
}

BatchProcess BatchProcess::create(std::vector<Matrix> d, double tol) {
    check_shapes(d, "D");
    if (d.size() < 2) throw ValidationError({"D: at least D_0 and D_1 are required"});
    auto issues = strict_issues(d, "D", tol);
    if (!issues.empty()) throw ValidationError(std::move(issues));
    // Trailing all-zero batch matrices carry no information.
    while (d.size() > 2 && d.back().cwiseAbs().maxCoeff() == 0.0) d.pop_back();
    // Round-off negatives within tolerance become exact zeros.
    for (size_t k = 0; k < d.size(); ++k) {
        for (Index r = 0; r < d[k].rows(); ++r) {
            for (Index c = 0; c < d[k].cols(); ++c) {
                if ((k > 0 || r != c) && d[k](r, c) < 0.0) d[k](r, c) = 0.0;
            }
        }
    }
    return BatchProcess(std::move(d));
}

BatchProcess BatchProcess::poisson(double rate) {
    return create({Matrix::Constant(1, 1, -rate), Matrix::Constant(1, 1, rate)});
}

const Matrix& BatchProcess::d(int k) const {
    if (k < 0) throw DimensionError("negative batch size");
    return k <= max_batch() ? d_[static_cast<size_t>(k)] : zero_;
}

Matrix BatchProcess::rate_matrix() const {
    Matrix out = Matrix::Zero(dim(), dim());
    for (int k = 1; k <= max_batch(); ++k) out += k * d_[static_cast<size_t>(k)];
    return out;
}

ValidatedProcess validate_bmap(std::vector<Matrix> d, ValidationMode mode, double repair_cap, const std::string& label,
                               double tol) {
    check_shapes(d, label);
    if (d.size() < 2) throw ValidationError({label + ": at least D_0 and D_1 are required"});
    std::vector<Repair> repairs;
    if (mode == ValidationMode::Repair) {
        std::vector<std::string> issues;
        const Index n = d.front().rows();
        for (Index r = 0; r < n; ++r) {
            if (d[0](r, r) > 0.0) {
                repairs.push_back({0, r, r, d[0](r, r), -d[0](r, r), "positive diagonal of D_0, sign flipped"});
                d[0](r, r) = -d[0](r, r);
            }
            for (size_t k = 0; k < d.size(); ++k) {
                for (Index c = 0; c < n; ++c) {
                    if (k == 0 && c == r) continue;
                    const double x = d[k](r, c);
                    if (x < 0.0) {
                        if (-x > repair_cap) {
                            issues.push_back(at(label, static_cast<int>(k), r, c) + " = " + num(x) +
                                             ": negative rate beyond repair cap " + num(repair_cap));
                        } else {
                            repairs.push_back({static_cast<int>(k), r, c, x, 0.0, "negative rate clamped"});
                            d[k](r, c) = 0.0;
                        }
                    }
                }
            }
            double defect = 0.0;
            for (const auto& m : d) defect += m.row(r).sum();
            if (std::abs(defect) > repair_cap) {
                issues.push_back(label + "(1) row " + std::to_string(r) + " sums to " + num(defect) +
                                 ": defect beyond repair cap " + num(repair_cap) + " (irreparable model)");
                continue;
            }
            const double before = d[0](r, r);
            // Rebuild the diagonal from the remaining entries so the row balances exactly.
            double others = 0.0;
            for (size_t k = 0; k < d.size(); ++k) {
                for (Index c = 0; c < n; ++c) {
                    if (!(k == 0 && c == r)) others += d[k](r, c);
                }
            }
            d[0](r, r) = -others;
            if (std::abs(defect) > tol) {
                repairs.push_back({0, r, r, before, d[0](r, r), "diagonal reset to balance row sum " + num(defect)});
            }
        }
        if (!issues.empty()) throw ValidationError(std::move(issues));
    }
    auto issues = strict_issues(d, label, tol);
    if (!issues.empty()) throw ValidationError(std::move(issues));
    return {BatchProcess::create(std::move(d), tol), std::move(repairs)};
}

ArrivalStats arrival_stats(const BatchProcess& bp) {
    ArrivalStats s;
    s.theta = linalg::solve_left_null(bp.generator());
    const Vector e = Vector::Ones(bp.dim());
    s.lambda = s.theta * bp.rate_matrix() * e;
    const Matrix neg_d0 = -bp.d(0);
    s.lambda_g = s.theta * neg_d0 * e;
    const Vector tau = linalg::solve_linear(neg_d0, e);
    s.var_g = 2.0 / s.lambda_g * s.theta.dot(tau) - 1.0 / (s.lambda_g * s.lambda_g);
    const Vector jump = (bp.generator() - bp.d(0)) * tau;
    const Vector tau2 = linalg::solve_linear(neg_d0, jump);
    s.c_cor = (s.lambda_g * s.theta.dot(tau2) - 1.0) / (s.var_g * s.lambda_g * s.lambda_g);
    return s;
}

ModedArrival::ModedArrival(std::vector<BatchProcess> modes) : modes_(std::move(modes)) {
    if (modes_.empty()) throw ValidationError({"arrival family has no modes"});
    for (size_t l = 1; l < modes_.size(); ++l) {
        if (modes_[l].dim() != modes_.front().dim()) {
            throw ValidationError({"mode " + std::to_string(l + 1) + " has modulating dimension " +
                                   std::to_string(modes_[l].dim()) + ", mode 1 has " +
                                   std::to_string(modes_.front().dim())});
        }
    }
}

int ModedArrival::max_batch() const {
    int out = 0;
    for (const auto& m : modes_) out = std::max(out, m.max_batch());
    return out;
}

const BatchProcess& ModedArrival::mode(int l) const {
    if (l < 1 || l > count()) {
        throw DimensionError("mode " + std::to_string(l) + " outside 1.." + std::to_string(count()));
    }
    return modes_[static_cast<size_t>(l - 1)];
}

ModedArrival compose_independent(const std::vector<BatchProcess>& processes) {
    if (processes.empty()) throw ValidationError({"compose_independent: empty process list"});
    const int n = static_cast<int>(processes.size());
    int kmax = 0;
    for (const auto& p : processes) kmax = std::max(kmax, p.max_batch());

    std::vector<BatchProcess> modes;
    for (int l = 1; l <= n; ++l) {
        Index rest = 1;
        for (int m = l; m < n; ++m) rest *= processes[static_cast<size_t>(m)].dim();

        Matrix d0 = processes[0].d(0);
        for (int r = 1; r < l; ++r) d0 = linalg::kron_sum(d0, processes[static_cast<size_t>(r)].d(0));
        for (int m = l; m < n; ++m) d0 = linalg::kron_sum(d0, processes[static_cast<size_t>(m)].generator());

        std::vector<Matrix> d{d0};
        for (int k = 1; k <= kmax; ++k) {
            Matrix dk = processes[0].d(k);
            for (int r = 1; r < l; ++r) dk = linalg::kron_sum(dk, processes[static_cast<size_t>(r)].d(k));
            d.push_back(linalg::kron(dk, linalg::identity(rest)));
        }
        modes.push_back(BatchProcess::create(std::move(d)));
    }
    return ModedArrival(std::move(modes));
}

ModedArrival compose_thinned(const BatchProcess& bp, const std::vector<double>& q) {
    if (q.empty()) throw ValidationError({"compose_thinned: no thinning probabilities"});
    std::vector<std::string> issues;
    for (size_t l = 0; l < q.size(); ++l) {
        if (!(q[l] > 0.0 && q[l] <= 1.0)) issues.push_back("q_" + std::to_string(l + 1) + " = " + num(q[l]) + " outside (0, 1]");
        if (l > 0 && !(q[l] > q[l - 1])) issues.push_back("q must be strictly increasing at index " + std::to_string(l + 1));
    }
    if (q.back() != 1.0) issues.push_back("q_N must equal 1");
    if (!issues.empty()) throw ValidationError(std::move(issues));

    std::vector<BatchProcess> modes;
    for (double ql : q) {
        std::vector<Matrix> d{ql * bp.d(0) + (1.0 - ql) * bp.generator()};
        for (int k = 1; k <= bp.max_batch(); ++k) d.push_back(ql * bp.d(k));
        modes.push_back(BatchProcess::create(std::move(d)));
    }
    return ModedArrival(std::move(modes));
}

ModedArrival compose_bmmap(const Matrix& d0, const std::vector<std::vector<Matrix>>& robots) {
    if (robots.empty()) throw ValidationError({"compose_bmmap: no robots"});
    const int n = static_cast<int>(robots.size());
    size_t kmax = 0;
    for (const auto& r : robots) kmax = std::max(kmax, r.size());
    auto dk = [&](int m, size_t k) -> Matrix {
        const auto& r = robots[static_cast<size_t>(m - 1)];
        return k >= 1 && k <= r.size() ? r[k - 1] : Matrix::Zero(d0.rows(), d0.cols());
    };
    for (const auto& r : robots) check_shapes([&] {
        std::vector<Matrix> all{d0};
        all.insert(all.end(), r.begin(), r.end());
        return all;
    }(), "D");

    {
        std::vector<Matrix> full{d0};
        for (size_t k = 1; k <= kmax; ++k) {
            Matrix s = Matrix::Zero(d0.rows(), d0.cols());
            for (int m = 1; m <= n; ++m) s += dk(m, k);
            full.push_back(s);
        }
        auto issues = strict_issues(full, "combined D", 1e-9);
        if (!issues.empty()) throw ValidationError(std::move(issues));
    }

    std::vector<BatchProcess> modes;
    for (int l = 1; l <= n; ++l) {
        Matrix m0 = d0;
        for (int m = l + 1; m <= n; ++m) {
            for (size_t j = 1; j <= kmax; ++j) m0 += dk(m, j);
        }
        std::vector<Matrix> d{m0};
        for (size_t k = 1; k <= kmax; ++k) {
            Matrix s = Matrix::Zero(d0.rows(), d0.cols());
            for (int m = 1; m <= l; ++m) s += dk(m, k);
            d.push_back(s);
        }
        try {
            modes.push_back(BatchProcess::create(std::move(d)));
        } catch (const ValidationError& e) {
            std::vector<std::string> issues;
            for (const auto& s : e.issues()) issues.push_back("mode " + std::to_string(l) + ": " + s);
            throw ValidationError(std::move(issues));
        }
    }
    return ModedArrival(std::move(modes));
}

ModedArrival compose_direct(std::vector<BatchProcess> modes) { return ModedArrival(std::move(modes)); }

}  // namespace crawlq
