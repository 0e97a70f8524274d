#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "skre/session.hpp"

namespace skre::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitAbort = 3;
inline constexpr int kExitMismatch = 4;

struct RunSpec {
  std::string protocol = "ahe-dgk";
  std::uint32_t n = 0;
  std::uint32_t k = 0;  // 0: median, ceil(n/2)
  std::uint32_t t = 2;
  unsigned mu = 8;
  unsigned lambda = 128;
  std::uint64_t seed = 1;
  std::string transport = "loopback";
  std::string addr;  // empty: SKRE_ADDR, then 127.0.0.1:7450
  std::string inputs_file;
  std::vector<std::uint64_t> values;
  bool check = false;
  bool inject_fault = false;
  std::string metrics_out;
};

// Fills defaults (k = ceil(n/2); she forces t = n) and validates.
proto::SessionParams to_params(const RunSpec& spec);
std::string resolve_addr(const RunSpec& spec);

// Integers separated by whitespace or commas.
std::vector<std::uint64_t> parse_values(const std::string& text);
// --values, else --inputs file, else seeded random values below 2^mu.
std::vector<std::uint64_t> load_inputs(const RunSpec& spec);

// In-process run of every party over the chosen transport.
proto::SimulationResult simulate(const proto::SessionParams& params, std::span<const std::uint64_t> inputs,
                                 const std::string& transport, const std::string& addr);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace skre::cli
