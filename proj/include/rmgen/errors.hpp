#ifndef RMGEN_ERRORS_HPP
#define RMGEN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rmgen {

// Base for every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define RMGEN_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                    \
    public:                                                        \
        explicit Name(const std::string& what)                     \
            : Error(std::string(#Name ": ") + what) {}             \
    }

RMGEN_DEFINE_ERROR(MalformedRaster);
RMGEN_DEFINE_ERROR(DimensionMismatch);
RMGEN_DEFINE_ERROR(NegativeHeight);
RMGEN_DEFINE_ERROR(OutOfBounds);
RMGEN_DEFINE_ERROR(ZeroDirection);
RMGEN_DEFINE_ERROR(QuadratureNonConvergence);
RMGEN_DEFINE_ERROR(TxOutOfBounds);
RMGEN_DEFINE_ERROR(EmptyPathSet);
RMGEN_DEFINE_ERROR(DuplicateSampleId);
RMGEN_DEFINE_ERROR(MissingFile);
RMGEN_DEFINE_ERROR(PreconditionViolation);
RMGEN_DEFINE_ERROR(NormalizationRange);
RMGEN_DEFINE_ERROR(ConfigError);
RMGEN_DEFINE_ERROR(ManifestVersionMismatch);

#undef RMGEN_DEFINE_ERROR

}  // namespace rmgen

#endif  // RMGEN_ERRORS_HPP
