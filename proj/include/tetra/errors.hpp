#pragma once

#include <stdexcept>
#include <string>

namespace tetra {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DenominatorNearZero : Error {
    explicit DenominatorNearZero(const std::string& msg) : Error(msg) {}
};
struct SamplerExhausted : Error {
    explicit SamplerExhausted(const std::string& msg) : Error(msg) {}
};
struct ShapeMismatch : Error {
    explicit ShapeMismatch(const std::string& msg) : Error(msg) {}
};
struct NodeMismatch : Error {
    explicit NodeMismatch(const std::string& msg) : Error(msg) {}
};
struct NotHermitian : Error {
    explicit NotHermitian(const std::string& msg) : Error(msg) {}
};
struct NotPSD : Error {
    explicit NotPSD(const std::string& msg) : Error(msg) {}
};
struct SchurConstraintViolated : Error {
    explicit SchurConstraintViolated(const std::string& msg) : Error(msg) {}
};
struct GeneratorStalled : Error {
    explicit GeneratorStalled(const std::string& msg) : Error(msg) {}
};
struct EigenFailure : Error {
    explicit EigenFailure(const std::string& msg) : Error(msg) {}
};
struct BadGrid : Error {
    explicit BadGrid(const std::string& msg) : Error(msg) {}
};
struct NumericalBreakdown : Error {
    explicit NumericalBreakdown(const std::string& msg) : Error(msg) {}
};
struct NoWitnessFound : Error {
    explicit NoWitnessFound(const std::string& msg) : Error(msg) {}
};
struct BisectionIndeterminate : Error {
    explicit BisectionIndeterminate(const std::string& msg) : Error(msg) {}
};
struct GramMismatch : Error {
    explicit GramMismatch(const std::string& msg) : Error(msg) {}
};
struct CompletionFailure : Error {
    explicit CompletionFailure(const std::string& msg) : Error(msg) {}
};
struct OutsideDomain : Error {
    explicit OutsideDomain(const std::string& msg) : Error(msg) {}
};
struct LinearSolveFailure : Error {
    explicit LinearSolveFailure(const std::string& msg) : Error(msg) {}
};
struct SingularResolvent : Error {
    explicit SingularResolvent(const std::string& msg) : Error(msg) {}
};
struct NotStrictlyPD : Error {
    explicit NotStrictlyPD(const std::string& msg) : Error(msg) {}
};
struct NotDiagonalizable : Error {
    explicit NotDiagonalizable(const std::string& msg) : Error(msg) {}
};
struct EigenvalueOutsideDomain : Error {
    explicit EigenvalueOutsideDomain(const std::string& msg) : Error(msg) {}
};
struct WitnessUnavailable : Error {
    explicit WitnessUnavailable(const std::string& msg) : Error(msg) {}
};
struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

}  // namespace tetra
