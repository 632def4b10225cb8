#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace triopt {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidDimensionError : Error {
    using Error::Error;
};

struct InvalidScaleError : Error {
    using Error::Error;
};

struct InvalidSampleCountError : Error {
    using Error::Error;
};

struct InsufficientSamplesError : Error {
    using Error::Error;
};

struct ShapeError : Error {
    using Error::Error;
};

struct NumericalError : Error {
    using Error::Error;
};

struct UncenteredDataError : Error {
    using Error::Error;
};

struct EmptySelectionError : Error {
    using Error::Error;
};

struct ConstraintViolationError : Error {
    using Error::Error;
};

struct OptimizerDivergenceError : Error {
    OptimizerDivergenceError(const std::string& msg, int iter)
        : Error(msg), iteration(iter) {}
    int iteration;
};

struct RankDeficiencyError : Error {
    RankDeficiencyError(const std::string& msg, int col)
        : Error(msg), column(col) {}
    int column;
};

struct InvalidFractionError : Error {
    using Error::Error;
};

// row is 1-based; 0 means the file as a whole (e.g. empty input).
struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t row_index)
        : Error(msg), row(row_index) {}
    std::size_t row;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace triopt
