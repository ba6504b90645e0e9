#pragma once

#include <optional>
#include <string>

#include "ftcy/suite.hpp"

namespace ftcy {
namespace cli {

// Exit codes: 0 success, 2 numerical failure, 3 usage, 4 I/O.
inline constexpr int exit_ok = 0;
inline constexpr int exit_numeric = 2;
inline constexpr int exit_usage = 3;
inline constexpr int exit_io = 4;

struct ConstructOptions {
  double delta = 0.5;
  int n = 3;
  int grid = 256;
  double tol = 1e-10;
  std::string out_dir = ".";
};

struct SolveOptions {
  std::optional<std::string> f_path;       // FDF/1 scalar source term
  std::optional<double> gen_amplitude;     // or the built-in generator
  std::uint64_t gen_seed = 7;
  int gen_max_mode = 2;
  int n = 3;
  std::vector<int> axes = {1, 3};
  std::vector<int> grid = {64, 64};
  double tol = 1e-8;
  int continuation_steps = 8;
  int max_iters = 60;
  bool margin = true;  // also estimate the kernel margin at the solution
  std::string out_dir = ".";
};

struct VerifyOptions {
  SuiteConfig suite;
};

struct RicciOptions {
  std::string metric_path;
  std::string out_dir = ".";
};

struct ReportOptions {
  std::string dir = ".";
};

int run_construct(const ConstructOptions& opt);
int run_solve(const SolveOptions& opt);
int run_verify(const VerifyOptions& opt);
int run_ricci(const RicciOptions& opt);
int run_report(const ReportOptions& opt);

int main_entry(int argc, const char* const* argv);

}  // namespace cli
}  // namespace ftcy
