#include "llmaudit/llmaudit.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <string>

#include "llmaudit/benchmark.hpp"
#include "llmaudit/error.hpp"
#include "llmaudit/gateway.hpp"
#include "llmaudit/provider.hpp"
#include "llmaudit/report.hpp"
#include "llmaudit/runner.hpp"
#include "llmaudit/similarity.hpp"

struct llmaudit_benchmark {
  llmaudit::Benchmark value;
};

struct llmaudit_gateway {
  std::unique_ptr<llmaudit::Gateway> value;
};

namespace {

thread_local std::string last_error;

llmaudit_status set_error(llmaudit_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <typename Fn>
llmaudit_status guarded(Fn&& fn) {
  last_error.clear();
  try {
    return fn();
  } catch (const llmaudit::Error& e) {
    return set_error(static_cast<llmaudit_status>(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return set_error(LLMAUDIT_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(LLMAUDIT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(LLMAUDIT_ERR_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

llmaudit::Json parse_options(const char* options_json) {
  if (!options_json || !*options_json) return nullptr;
  try {
    return llmaudit::Json::parse(options_json);
  } catch (const llmaudit::Json::parse_error& e) {
    llmaudit::fail(llmaudit::ErrorCode::kInvalidArgument,
                   std::string("run options: ") + e.what());
  }
}

using Command = llmaudit::CommandResult (*)(llmaudit::Gateway&, const llmaudit::Benchmark&,
                                            const llmaudit::RunOptions&);

llmaudit_status run_command(Command command, llmaudit_gateway* gateway,
                            const llmaudit_benchmark* benchmark, const char* options_json,
                            char** report_json, int* all_passed) {
  return guarded([&] {
    if (!gateway || !benchmark || !report_json || !all_passed) {
      return set_error(LLMAUDIT_ERR_INVALID_ARGUMENT, "null argument");
    }
    *report_json = nullptr;
    *all_passed = 0;
    const auto options = llmaudit::parse_run_options(parse_options(options_json));
    auto result = command(*gateway->value, benchmark->value, options);
    *report_json = dup_string(llmaudit::render_json(result.report));
    *all_passed = result.all_passed ? 1 : 0;
    if (result.failure) {
      return set_error(static_cast<llmaudit_status>(result.failure->code),
                       result.failure->message);
    }
    return LLMAUDIT_OK;
  });
}

}  // namespace

extern "C" {

const char* llmaudit_version(void) { return "1.0.0"; }

const char* llmaudit_last_error(void) { return last_error.c_str(); }

void llmaudit_string_free(char* s) { std::free(s); }

llmaudit_status llmaudit_similarity(const char* a, const char* b, double out[4]) {
  return guarded([&] {
    if (!a || !b || !out) return set_error(LLMAUDIT_ERR_INVALID_ARGUMENT, "null argument");
    const auto v = llmaudit::similarity_vector(a, b);
    out[0] = v.sequence;
    out[1] = v.levenshtein;
    out[2] = v.jaccard;
    out[3] = v.cosine;
    return LLMAUDIT_OK;
  });
}

llmaudit_status llmaudit_benchmark_load(const char* path, llmaudit_benchmark** out) {
  return guarded([&] {
    if (!path || !out) return set_error(LLMAUDIT_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    *out = new llmaudit_benchmark{llmaudit::load_benchmark(path)};
    return LLMAUDIT_OK;
  });
}

size_t llmaudit_benchmark_size(const llmaudit_benchmark* benchmark) {
  return benchmark ? benchmark->value.questions.size() : 0;
}

void llmaudit_benchmark_free(llmaudit_benchmark* benchmark) { delete benchmark; }

llmaudit_status llmaudit_gateway_open(const char* providers_path, const char* cache_path,
                                      const char* mode, llmaudit_gateway** out) {
  return guarded([&] {
    if (!providers_path || !cache_path || !mode || !out) {
      return set_error(LLMAUDIT_ERR_INVALID_ARGUMENT, "null argument");
    }
    *out = nullptr;
    auto parsed = llmaudit::parse_mode(mode);
    if (!parsed) {
      return set_error(LLMAUDIT_ERR_INVALID_ARGUMENT,
                       std::string("mode must be record or replay, got \"") + mode + "\"");
    }
    llmaudit::GatewayOptions options;
    options.mode = *parsed;
    options.cache_path = cache_path;
    auto gateway = std::make_unique<llmaudit::Gateway>(
        llmaudit::load_provider_config(providers_path), std::move(options));
    *out = new llmaudit_gateway{std::move(gateway)};
    return LLMAUDIT_OK;
  });
}

llmaudit_status llmaudit_gateway_flush(llmaudit_gateway* gateway) {
  return guarded([&] {
    if (!gateway) return set_error(LLMAUDIT_ERR_INVALID_ARGUMENT, "null argument");
    gateway->value->flush();
    return LLMAUDIT_OK;
  });
}

void llmaudit_gateway_free(llmaudit_gateway* gateway) {
  if (!gateway) return;
  try {
    gateway->value->flush();
  } catch (...) {
  }
  delete gateway;
}

llmaudit_status llmaudit_run_consistency(llmaudit_gateway* gateway,
                                         const llmaudit_benchmark* benchmark,
                                         const char* options_json, char** report_json,
                                         int* all_passed) {
  return run_command(llmaudit::run_consistency_command, gateway, benchmark, options_json,
                     report_json, all_passed);
}

llmaudit_status llmaudit_run_self_validation(llmaudit_gateway* gateway,
                                             const llmaudit_benchmark* benchmark,
                                             const char* options_json, char** report_json,
                                             int* all_passed) {
  return run_command(llmaudit::run_self_validation_command, gateway, benchmark, options_json,
                     report_json, all_passed);
}

llmaudit_status llmaudit_run_cross_validation(llmaudit_gateway* gateway,
                                              const llmaudit_benchmark* benchmark,
                                              const char* options_json, char** report_json,
                                              int* all_passed) {
  return run_command(llmaudit::run_cross_validation_command, gateway, benchmark, options_json,
                     report_json, all_passed);
}

llmaudit_status llmaudit_build_tables(const char* const* report_jsons, size_t count,
                                      char** tables_json) {
  return guarded([&] {
    if (!tables_json || (count > 0 && !report_jsons)) {
      return set_error(LLMAUDIT_ERR_INVALID_ARGUMENT, "null argument");
    }
    std::vector<llmaudit::Json> docs;
    for (size_t i = 0; i < count; ++i) {
      try {
        docs.push_back(llmaudit::Json::parse(report_jsons[i]));
      } catch (const llmaudit::Json::parse_error& e) {
        llmaudit::fail(llmaudit::ErrorCode::kParse,
                       "report input " + std::to_string(i + 1) + ": " + e.what());
      }
    }
    *tables_json = dup_string(llmaudit::render_json(llmaudit::build_tables_report(docs)));
    return LLMAUDIT_OK;
  });
}

llmaudit_status llmaudit_emit(const char* report_json, const char* out_dir, const char* stem,
                              int formats) {
  return guarded([&] {
    if (!report_json || !out_dir || !stem) {
      return set_error(LLMAUDIT_ERR_INVALID_ARGUMENT, "null argument");
    }
    const auto doc = llmaudit::Json::parse(report_json);
    const std::filesystem::path dir(out_dir);
    if (formats & LLMAUDIT_FORMAT_JSON) {
      llmaudit::emit_report(doc, dir / (std::string(stem) + ".json"));
    }
    if (formats & LLMAUDIT_FORMAT_CSV) {
      for (const auto& table : llmaudit::tables_for(doc)) {
        llmaudit::emit_table(table, dir / (table.name + ".csv"));
      }
    }
    return LLMAUDIT_OK;
  });
}

}  // extern "C"
