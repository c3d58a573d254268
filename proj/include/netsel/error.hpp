#pragma once

#include <stdexcept>
#include <string>

namespace netsel {

enum class errc {
  io_error,
  malformed_file,
  dangling_reference,
  duplicate_profile,
  mixed_image,
  empty_registry,
  unknown_metric,
  incomplete_scores,
  empty_labels,
  infeasible,
  empty_class,
  degenerate_image,
  degenerate_corpus,
  unknown_kind,
  invalid_argument,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::io_error: return "io_error";
    case errc::malformed_file: return "malformed_file";
    case errc::dangling_reference: return "dangling_reference";
    case errc::duplicate_profile: return "duplicate_profile";
    case errc::mixed_image: return "mixed_image";
    case errc::empty_registry: return "empty_registry";
    case errc::unknown_metric: return "unknown_metric";
    case errc::incomplete_scores: return "incomplete_scores";
    case errc::empty_labels: return "empty_labels";
    case errc::infeasible: return "infeasible";
    case errc::empty_class: return "empty_class";
    case errc::degenerate_image: return "degenerate_image";
    case errc::degenerate_corpus: return "degenerate_corpus";
    case errc::unknown_kind: return "unknown_kind";
    case errc::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace netsel
