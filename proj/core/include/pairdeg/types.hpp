#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace pairdeg {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;

inline constexpr cplx kI{0.0, 1.0};

/// Raised when a ModelSpec or a configuration block violates its invariants.
class InvalidModel : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical stage cannot deliver a result within tolerance
/// (eigensolver failure, unresolvable continuation, ill-conditioned fit).
class NumericFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string format_complex(cplx z);

/// Provenance stamped on serialized outputs: a "# ..." comment line for CSV,
/// a leading "meta" object for JSON. Empty fields are omitted.
struct OutputMeta {
    std::string tool;
    std::string version;
    std::string config_hash;

    bool empty() const { return tool.empty() && version.empty() && config_hash.empty(); }
    std::string csv_comment() const;
};

}  // namespace pairdeg
