#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nsais {

// Every failure raised by the library derives from Error, so callers can
// catch the family or a single kind.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define NSAIS_ERROR(Name)                      \
    class Name : public Error {                \
    public:                                    \
        using Error::Error;                    \
    }

NSAIS_ERROR(EmptySet);
NSAIS_ERROR(DimensionMismatch);
NSAIS_ERROR(UnknownConditioningValue);
NSAIS_ERROR(OutOfRangeAction);
NSAIS_ERROR(OutOfRangeObservation);
NSAIS_ERROR(InfeasibleObservation);
NSAIS_ERROR(GeneratorIncomplete);
NSAIS_ERROR(NegativeInput);
NSAIS_ERROR(Disconnected);
NSAIS_ERROR(EmptyDataset);
NSAIS_ERROR(MissingKey);
NSAIS_ERROR(OutOfDomain);
NSAIS_ERROR(SchemaError);

#undef NSAIS_ERROR

class ModelTooLarge : public Error {
public:
    ModelTooLarge(std::size_t count, std::size_t budget)
        : Error("reachable count " + std::to_string(count) + " exceeds budget " +
                std::to_string(budget)),
          count_(count),
          budget_(budget) {}

    std::size_t count() const { return count_; }
    std::size_t budget() const { return budget_; }

private:
    std::size_t count_;
    std::size_t budget_;
};

}  // namespace nsais
