#include "karabo/error.hpp"

namespace karabo {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Schema: return "E_SCHEMA";
    case ErrorCode::Provider: return "E_PROVIDER";
    case ErrorCode::RateLimit: return "E_RATE_LIMIT";
    case ErrorCode::EmptyCompletion: return "E_EMPTY_COMPLETION";
    case ErrorCode::Degenerate: return "E_DEGENERATE";
    case ErrorCode::Template: return "E_TEMPLATE";
    case ErrorCode::EmptyInput: return "E_EMPTY_INPUT";
    case ErrorCode::Upstream: return "E_UPSTREAM";
    case ErrorCode::EmptyDataset: return "E_EMPTY_DATASET";
    case ErrorCode::Range: return "E_RANGE";
    case ErrorCode::Config: return "E_CONFIG";
    case ErrorCode::NotFound: return "E_NOT_FOUND";
    case ErrorCode::Io: return "E_IO";
  }
  return "E_UNKNOWN";
}

}  // namespace karabo
