#ifndef LOEWNER_ERRORS_HPP
#define LOEWNER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace loewner {

// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define LOEWNER_DEFINE_ERROR(Name)                                  \
    struct Name : Error {                                           \
        explicit Name(const std::string& msg) : Error(msg) {}       \
    }

// Driver construction / manipulation.
LOEWNER_DEFINE_ERROR(NonMonotoneTimes);
LOEWNER_DEFINE_ERROR(NonzeroOrigin);
LOEWNER_DEFINE_ERROR(LengthMismatch);
LOEWNER_DEFINE_ERROR(DegenerateStep);
LOEWNER_DEFINE_ERROR(OutOfRange);
LOEWNER_DEFINE_ERROR(BadHorizon);
LOEWNER_DEFINE_ERROR(ModeMismatch);

// Conformal map evaluation.
LOEWNER_DEFINE_ERROR(BadPoint);
LOEWNER_DEFINE_ERROR(BranchFailure);
LOEWNER_DEFINE_ERROR(SingularStep);

// Unzipping.
LOEWNER_DEFINE_ERROR(NotSimple);
LOEWNER_DEFINE_ERROR(NotInUpperHalfPlane);
LOEWNER_DEFINE_ERROR(DegenerateSegment);

// Radial / theta machinery.
LOEWNER_DEFINE_ERROR(TargetSwallowed);
LOEWNER_DEFINE_ERROR(PastStoppingTime);

// Bessel lab.
LOEWNER_DEFINE_ERROR(OutOfDomain);

// Geometry.
LOEWNER_DEFINE_ERROR(EmptySet);
LOEWNER_DEFINE_ERROR(DomainViolation);
LOEWNER_DEFINE_ERROR(LowerHalfPlane);

// Multichordal.
LOEWNER_DEFINE_ERROR(CoincidentPoints);
LOEWNER_DEFINE_ERROR(NotAPartition);
LOEWNER_DEFINE_ERROR(CrossingPairs);

// IO / CLI.
LOEWNER_DEFINE_ERROR(FormatError);

#undef LOEWNER_DEFINE_ERROR

} // namespace loewner

#endif
