#pragma once

#include <stdexcept>
#include <string>

namespace stochctl {

// Bad arguments or an unsupported request. The CLI maps these to exit code 2.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NonIntegerSpan : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class HorizonTooShort : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class DegenerateHorizon : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class Unsupported : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class EmptyEnsemble : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

// Failures discovered while computing. The CLI maps these to exit code 3.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonFiniteState : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class DegenerateWeight : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class ZeroMass : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class ZeroDivision : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class IllConditionedFit : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class DivergedTraining : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

} // namespace stochctl
