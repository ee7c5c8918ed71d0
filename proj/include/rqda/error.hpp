#ifndef RQDA_ERROR_HPP
#define RQDA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace rqda {

// Base for every failure raised by the library. Subclasses partition by who
// is at fault: the caller (ContractError, DomainError), the input data
// (DataError), or the fitting problem itself (TrainingError, SingularMatrixError).
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ContractError : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class DataError : public Error {
public:
  using Error::Error;
};

class TrainingError : public Error {
public:
  using Error::Error;
};

// Cholesky factorization failed; the caller has to raise the ridge.
class SingularMatrixError : public Error {
public:
  using Error::Error;
};

class FormatError : public Error {
public:
  using Error::Error;
};

} // namespace rqda

#endif // RQDA_ERROR_HPP
