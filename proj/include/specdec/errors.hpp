#pragma once

#include <stdexcept>
#include <string>

namespace specdec {

// Base class for all typed failures raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AllZeroError : Error {
  AllZeroError() : Error("weight vector sums to zero") {}
};

struct VocabMismatchError : Error {
  explicit VocabMismatchError(const std::string& what) : Error("vocab mismatch: " + what) {}
};

struct EmptyCorpusError : Error {
  EmptyCorpusError() : Error("corpus text produced no tokens") {}
};

struct CorpusTooShortError : Error {
  explicit CorpusTooShortError(const std::string& what) : Error("corpus too short: " + what) {}
};

struct ZeroProbabilityError : Error {
  explicit ZeroProbabilityError(const std::string& what) : Error("zero probability: " + what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error("io error: " + what) {}
};

struct FormatError : Error {
  explicit FormatError(const std::string& what) : Error("format error: " + what) {}
};

struct DegenerateLabelsError : Error {
  DegenerateLabelsError() : Error("training set contains a single label class") {}
};

struct SingleClassError : Error {
  SingleClassError() : Error("both label classes are required") {}
};

struct DivergentError : Error {
  explicit DivergentError(const std::string& what) : Error("divergent: " + what) {}
};

struct InvalidTauError : Error {
  explicit InvalidTauError(double tau)
      : Error("decision threshold tau must lie in (0,1), got " + std::to_string(tau)) {}
};

struct EmptyReferenceError : Error {
  EmptyReferenceError() : Error("reference sequence is empty") {}
};

}  // namespace specdec
