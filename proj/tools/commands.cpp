#include "commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "acceptance.hpp"
#include "skre/aheg.hpp"
#include "skre/errors.hpp"
#include "skre/metrics.hpp"
#include "skre/tcp.hpp"

namespace skre::cli {

proto::SessionParams to_params(const RunSpec& spec) {
  const net::ProtocolId protocol = net::parse_protocol(spec.protocol);
  core::ProtocolConfig c;
  c.n = spec.n;
  c.k = spec.k == 0 ? (spec.n + 1) / 2 : spec.k;
  c.t = protocol == net::ProtocolId::She ? spec.n : std::min(spec.t, spec.n);
  c.mu = spec.mu;
  c.lambda = spec.lambda;
  c.seed = spec.seed;
  return proto::make_params(protocol, c);
}

std::string resolve_addr(const RunSpec& spec) {
  if (!spec.addr.empty()) return spec.addr;
  if (const char* env = std::getenv("SKRE_ADDR"); env && *env) return env;
  return "127.0.0.1:7450";
}

std::vector<std::uint64_t> parse_values(const std::string& text) {
  std::string s = text;
  for (char& ch : s) {
    if (ch == ',') ch = ' ';
  }
  std::istringstream is(s);
  std::vector<std::uint64_t> out;
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
      if (tok[0] == '-') throw std::invalid_argument("negative");
      v = std::stoull(tok, &used);
    } catch (const std::exception&) {
      throw ConfigError("not a non-negative integer: '" + tok + "'");
    }
    if (used != tok.size()) throw ConfigError("not a non-negative integer: '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<std::uint64_t> load_inputs(const RunSpec& spec) {
  std::vector<std::uint64_t> v;
  if (!spec.values.empty()) {
    v = spec.values;
  } else if (!spec.inputs_file.empty()) {
    std::ifstream in(spec.inputs_file);
    if (!in) throw ConfigError("cannot read inputs file " + spec.inputs_file);
    std::stringstream ss;
    ss << in.rdbuf();
    v = parse_values(ss.str());
  } else {
    Prng rng = Prng::from_seed(spec.seed, "skre-cli-inputs");
    for (std::uint32_t i = 0; i < spec.n; ++i) v.push_back(rng.uniform(std::uint64_t{1} << spec.mu));
  }
  if (v.size() != spec.n) {
    throw ConfigError("expected " + std::to_string(spec.n) + " inputs, got " + std::to_string(v.size()));
  }
  for (auto x : v) {
    if (spec.mu < 64 && (x >> spec.mu) != 0) throw ConfigError("input " + std::to_string(x) + " does not fit in mu bits");
  }
  return v;
}

namespace {

proto::SimulationResult simulate_tcp(const proto::SessionParams& params, std::span<const std::uint64_t> inputs,
                                     const std::string& addr) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto dealer = proto::run_dealer(params);
  proto::ServerSession server(params, dealer);
  std::vector<std::unique_ptr<proto::ClientSession>> clients;
  for (core::PartyId id = 1; id <= params.config.n; ++id) {
    clients.push_back(std::make_unique<proto::ClientSession>(params, id, inputs[id - 1], dealer));
  }
  const net::Router router(params.protocol, params.session_id, params.config.n);

  net::TcpServerOptions so;
  so.bind = net::Address::parse(addr);
  std::promise<std::uint16_t> port_promise;
  bool port_set = false;
  so.on_listening = [&](std::uint16_t p) {
    port_set = true;
    port_promise.set_value(p);
  };
  net::Transcript transcript;
  std::string server_error;
  std::thread server_thread([&] {
    try {
      transcript = net::run_tcp_server(router, server, so);
    } catch (const std::exception& ex) {
      server_error = ex.what();
      if (!port_set) port_promise.set_value(0);
    }
  });
  const std::uint16_t port = port_promise.get_future().get();
  std::vector<std::thread> threads;
  if (port != 0) {
    for (auto& c : clients) {
      threads.emplace_back([&, ep = c.get()] {
        net::TcpClientOptions co;
        co.server = so.bind;
        co.server.port = port;
        try {
          net::run_tcp_client(*ep, co);
        } catch (const std::exception&) {
          // the client's own error, if any, is kept by its session
        }
      });
    }
  }
  for (auto& t : threads) t.join();
  server_thread.join();
  if (!server_error.empty()) throw ProtocolAbort("tcp server: " + server_error);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return proto::summarize(params, server, clients, std::move(transcript), ms);
}

void add_config_flags(CLI::App* app, RunSpec& spec) {
  app->add_option("--protocol", spec.protocol, "ygc | ahe-lin | ahe-dgk | she")->capture_default_str();
  app->add_option("--n", spec.n, "number of clients")->required();
  app->add_option("--k", spec.k, "target rank (default: median)");
  app->add_option("--t", spec.t, "decryption threshold (she: always n)")->capture_default_str();
  app->add_option("--mu", spec.mu, "input bit length")->capture_default_str();
  app->add_option("--lambda", spec.lambda, "garbling security parameter (80 or 128)")->capture_default_str();
  app->add_option("--seed", spec.seed, "seed for keys and protocol randomness")->capture_default_str();
}

void write_metrics(const std::string& path, const std::string& json) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write metrics to " + path);
  f << json << "\n";
}

int cmd_simulate(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  const auto params = to_params(spec);
  const auto inputs = load_inputs(spec);
  auto run_params = params;
  if (spec.inject_fault) run_params.config.k = params.config.k % params.config.n + 1;
  if (spec.transport != "loopback" && spec.transport != "tcp") throw ConfigError("transport must be loopback or tcp");
  const std::string addr = spec.transport == "tcp" ? (spec.addr.empty() ? "127.0.0.1:0" : spec.addr) : "";
  const auto res = simulate(run_params, inputs, spec.transport, addr);
  auto metrics = proto::collect_metrics(res);
  write_metrics(spec.metrics_out, proto::metrics_json(metrics));
  if (!res.ok()) {
    err << "session aborted: " << res.abort_reason << "\n";
    for (std::size_t i = 0; i < res.client_errors.size(); ++i) {
      if (!res.client_errors[i].empty()) err << "  client " << i + 1 << ": " << res.client_errors[i] << "\n";
    }
    return kExitAbort;
  }
  const std::uint64_t kre = *metrics.result;
  for (core::PartyId id : res.roster) {
    if (res.outputs[id - 1] != kre) {
      err << "clients disagree on the result\n";
      return kExitMismatch;
    }
  }
  out << "KRE: " << kre << "\n";
  out << "rounds: " << metrics.rounds << "  transcript: " << metrics.transcript_hash << "\n";
  if (spec.check) {
    std::vector<core::PlainInput> plain;
    for (core::PartyId id : res.roster) plain.push_back({inputs[id - 1], id});
    const std::uint64_t expected = core::kre_oracle(plain, params.config.k);
    if (expected != kre) {
      err << "check failed: expected " << expected << ", protocol returned " << kre << "\n";
      return kExitMismatch;
    }
    out << "check: ok\n";
  }
  return kExitOk;
}

int cmd_server(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  const auto params = to_params(spec);
  const auto t0 = std::chrono::steady_clock::now();
  const auto dealer = proto::run_dealer(params);
  proto::ServerSession server(params, dealer);
  const net::Router router(params.protocol, params.session_id, params.config.n);
  net::TcpServerOptions so;
  so.bind = net::Address::parse(resolve_addr(spec));
  so.on_listening = [&](std::uint16_t port) { out << "listening on " << so.bind.host << ":" << port << std::endl; };
  const auto transcript = net::run_tcp_server(router, server, so);
  auto metrics = proto::collect_metrics(params, transcript);
  metrics.aborted = server.status() != proto::ServerSession::Status::Done;
  metrics.abort_reason = server.abort_reason();
  metrics.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  write_metrics(spec.metrics_out, proto::metrics_json(metrics));
  if (metrics.aborted) {
    err << "session aborted: " << server.abort_reason() << "\n";
    return kExitAbort;
  }
  out << "session complete: rounds " << metrics.rounds << ", transcript " << metrics.transcript_hash << "\n";
  return kExitOk;
}

int cmd_client(const RunSpec& spec, core::PartyId id, std::uint64_t value, std::ostream& out, std::ostream& err) {
  const auto params = to_params(spec);
  const auto dealer = proto::run_dealer(params);
  proto::ClientSession client(params, id, value, dealer);
  net::TcpClientOptions co;
  co.server = net::Address::parse(resolve_addr(spec));
  net::run_tcp_client(client, co);
  if (!client.output()) {
    err << "client " << id << " failed: " << client.error() << "\n";
    return kExitAbort;
  }
  out << "KRE: " << *client.output() << "\n";
  return kExitOk;
}

int cmd_keygen(const RunSpec& spec, std::ostream& out) {
  const auto params = to_params(spec);
  const auto dealer = proto::run_dealer(params);
  nlohmann::ordered_json j;
  j["protocol"] = spec.protocol;
  j["curve"] = aheg::Group::instance().curve_name();
  j["n"] = params.config.n;
  j["t"] = params.config.t;
  j["session"] = params.session_id;
  if (dealer.ahe) j["common_pk"] = to_hex(dealer.ahe->pk.to_bytes());
  if (dealer.she) j["she_context"] = dealer.she->context->context_id();
  auto clients = nlohmann::ordered_json::array();
  for (core::PartyId id = 1; id <= params.config.n; ++id) {
    proto::ClientSession c(params, id, 0, dealer);
    clients.push_back({{"id", id},
                       {"pk", to_hex(c.protocol().keys().personal.pk.to_bytes())},
                       {"dh", to_hex(c.protocol().keys().dh.pk.to_bytes())}});
  }
  j["clients"] = std::move(clients);
  out << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_bench(const std::vector<std::string>& protocols, const std::vector<std::uint32_t>& ns, std::uint32_t t, unsigned mu,
              std::uint64_t seed, const std::string& out_path, std::ostream& out) {
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw ConfigError("cannot write " + out_path);
  }
  std::ostream& os = out_path.empty() ? out : file;
  os << proto::bench_csv_header() << "\n";
  for (const auto& name : protocols) {
    for (std::uint32_t n : ns) {
      RunSpec spec;
      spec.protocol = name;
      spec.n = n;
      spec.t = t;
      spec.mu = mu;
      spec.seed = seed;
      const auto params = to_params(spec);
      const auto row = proto::bench_protocol(params, load_inputs(spec));
      os << proto::bench_csv_line(row) << std::endl;
    }
  }
  return kExitOk;
}

}  // namespace

proto::SimulationResult simulate(const proto::SessionParams& params, std::span<const std::uint64_t> inputs,
                                 const std::string& transport, const std::string& addr) {
  if (transport == "tcp") return simulate_tcp(params, inputs, addr);
  return proto::run_simulation(params, inputs);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Secure k-th ranked element over a star network"};
  app.require_subcommand(1);
  RunSpec spec;
  std::string values_text;

  auto* sim = app.add_subcommand("simulate", "run server and all clients in one process");
  add_config_flags(sim, spec);
  sim->add_option("--transport", spec.transport, "loopback | tcp")->capture_default_str();
  sim->add_option("--addr", spec.addr, "bind address for --transport tcp (default 127.0.0.1:0)");
  sim->add_option("--inputs", spec.inputs_file, "file with n integers");
  sim->add_option("--values", values_text, "inputs as a comma-separated list");
  sim->add_flag("--check", spec.check, "exit 4 unless the result equals the plaintext oracle");
  sim->add_flag("--inject-fault", spec.inject_fault, "parties use a wrong rank (exercises --check)");
  sim->add_option("--metrics-out", spec.metrics_out, "write metrics JSON here");

  auto* srv = app.add_subcommand("server", "run the server over TCP");
  add_config_flags(srv, spec);
  srv->add_option("--addr", spec.addr, "bind address host:port (env SKRE_ADDR)");
  srv->add_option("--metrics-out", spec.metrics_out, "write metrics JSON here");

  core::PartyId client_id = 0;
  std::uint64_t client_value = 0;
  auto* cli = app.add_subcommand("client", "run one client over TCP");
  add_config_flags(cli, spec);
  cli->add_option("--addr", spec.addr, "server address host:port (env SKRE_ADDR)");
  cli->add_option("--id", client_id, "client index in [1, n]")->required();
  cli->add_option("--value", client_value, "private input")->required();

  auto* keys = app.add_subcommand("keygen", "print the test-mode dealer's public key material");
  add_config_flags(keys, spec);

  std::string bench_protocols = "ygc,ahe-lin,ahe-dgk,she";
  std::string bench_ns = "3,5,7";
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "CSV of wall time and traffic per protocol and n");
  bench->add_option("--protocols", bench_protocols, "comma-separated protocol list")->capture_default_str();
  bench->add_option("--n-list", bench_ns, "comma-separated client counts")->capture_default_str();
  bench->add_option("--t", spec.t, "decryption threshold")->capture_default_str();
  bench->add_option("--mu", spec.mu, "input bit length")->capture_default_str();
  bench->add_option("--seed", spec.seed, "seed")->capture_default_str();
  bench->add_option("--out", bench_out, "CSV path (default stdout)");

  bool quick = false;
  std::string only;
  auto* acc = app.add_subcommand("acceptance", "run the acceptance criteria");
  acc->add_flag("--quick", quick, "reduced instance counts");
  acc->add_option("--only", only, "comma-separated criterion numbers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (!values_text.empty()) spec.values = parse_values(values_text);
    if (sim->parsed()) return cmd_simulate(spec, out, err);
    if (srv->parsed()) return cmd_server(spec, out, err);
    if (cli->parsed()) return cmd_client(spec, client_id, client_value, out, err);
    if (keys->parsed()) return cmd_keygen(spec, out);
    if (bench->parsed()) {
      std::vector<std::string> protocols;
      std::stringstream ss(bench_protocols);
      for (std::string p; std::getline(ss, p, ',');) {
        if (!p.empty()) protocols.push_back(p);
      }
      std::vector<std::uint32_t> ns;
      for (auto v : parse_values(bench_ns)) ns.push_back(static_cast<std::uint32_t>(v));
      return cmd_bench(protocols, ns, spec.t, spec.mu, spec.seed, bench_out, out);
    }
    if (acc->parsed()) {
      acceptance::Options opts;
      opts.quick = quick;
      for (auto v : parse_values(only)) opts.only.push_back(static_cast<int>(v));
      const auto results = acceptance::run_acceptance(opts, out);
      for (const auto& r : results) {
        if (!r.pass) return kExitMismatch;
      }
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "aborted: " << e.what() << "\n";
    return kExitAbort;
  }
  return kExitConfig;
}

}  // namespace skre::cli
