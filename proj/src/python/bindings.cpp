#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "consent/api/gateway.hpp"
#include "consent/audit/audit.hpp"
#include "consent/common/crypto.hpp"
#include "consent/common/error.hpp"
#include "consent/ledger/ledger.hpp"
#include "consent/network/scenario.hpp"

namespace py = pybind11;
using namespace consent;

namespace {

// JSON crosses the boundary as text; the Python package wraps it with json.
using Reply = std::pair<int, std::string>;

Reply reply(const api::ApiResponse& r) { return {r.status, canonicalSerialize(r.body)}; }

Json parse(const std::string& text) { return text.empty() ? Json::object() : parseCanonical(text); }

py::dict reportDict(const audit::Report& r) {
  py::dict d;
  d["check"] = r.check;
  d["passed"] = r.verdict == audit::Verdict::Pass;
  d["exit_code"] = r.exitCode();
  d["details"] = r.details;
  d["lines"] = r.lines;
  d["summary"] = r.summaryLine();
  return d;
}

class PyGateway {
 public:
  PyGateway(std::optional<std::filesystem::path> dataDir, int peers, std::optional<int> quorum,
            int hashIterations, std::uint64_t seed, std::optional<std::pair<std::string, std::string>> admin) {
    api::GatewayConfig c;
    c.dataDir = std::move(dataDir);
    c.network.peerCount = peers;
    c.network.quorum = quorum;
    c.network.seed = seed;
    c.identity.iterations = hashIterations;
    if (admin) c.admin = api::AdminBootstrap{admin->first, admin->second};
    gateway_ = std::make_unique<api::Gateway>(std::move(c));
  }

  template <typename F>
  Reply call(F&& f) {
    py::gil_scoped_release release;
    return reply(f(*gateway_));
  }

  api::Gateway& gateway() { return *gateway_; }

 private:
  std::unique_ptr<api::Gateway> gateway_;
};

}  // namespace

PYBIND11_MODULE(_consentchain, m) {
  m.doc() = "Consent ledger core";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      std::string msg = std::string(errorCodeName(e.code())) + ": " + e.what();
      switch (e.code()) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::Parse:
        case ErrorCode::Serialization:
          PyErr_SetString(PyExc_ValueError, msg.c_str());
          break;
        case ErrorCode::Io:
          PyErr_SetString(PyExc_OSError, msg.c_str());
          break;
        default:
          PyErr_SetString(PyExc_RuntimeError, msg.c_str());
      }
    }
  });

  m.def("sha256_hex", [](py::bytes data) { return crypto::sha256Hex(std::string(data)); });
  m.def("compute_pair_key", [](const std::string& user, const std::string& company) {
    return ledger::computePairKey(user, company).hex();
  });
  m.def("canonicalize", [](const std::string& text) { return canonicalSerialize(parseCanonical(text)); },
        "Re-serializes JSON text in canonical form. Rejects floats.");
  m.def("genesis_hash", [] { return ledger::genesisBlock().blockHash; });
  m.def("hash_block", [](const std::string& blockJson) {
    return ledger::hashBlock(ledger::blockFromJson(parseCanonical(blockJson)));
  });
  m.def("validate_transaction", [](const std::string& txJson) {
    return ledger::validateTransaction(ledger::transactionFromJson(parseCanonical(txJson)));
  });

  m.def(
      "generate_scenario",
      [](std::uint64_t seed, int txs, int peers, std::optional<int> quorum, int companies, int users,
         std::int64_t latencyMinUs, std::int64_t latencyMaxUs, std::optional<int> partitionPeer) {
        network::Scenario s;
        s.config.peerCount = peers;
        s.config.quorum = quorum;
        s.config.seed = seed;
        s.config.latency = {latencyMinUs, latencyMaxUs};
        network::WorkloadSpec w;
        w.seed = seed;
        w.txCount = txs;
        w.companies = companies;
        w.users = users;
        w.partitionPeer = partitionPeer;
        s.steps = network::generateWorkload(w);
        return canonicalSerialize(toJson(s));
      },
      py::arg("seed"), py::arg("txs") = 1000, py::arg("peers") = 4, py::arg("quorum") = py::none(),
      py::arg("companies") = 10, py::arg("users") = 200, py::arg("latency_min_us") = 0,
      py::arg("latency_max_us") = 0, py::arg("partition_peer") = py::none());

  m.def(
      "run_scenario",
      [](const std::string& scenarioJson, std::optional<std::filesystem::path> outDir) {
        auto scenario = network::scenarioFromJson(parseCanonical(scenarioJson));
        network::Transcript t;
        {
          py::gil_scoped_release release;
          t = network::runScenario(scenario, outDir);
        }
        py::list peers;
        for (const auto& p : t.peers) {
          py::dict d;
          d["peer"] = p.peerId;
          d["height"] = p.height;
          d["tip_hash"] = p.tipHash;
          d["state_hash"] = p.stateHash;
          peers.append(d);
        }
        py::dict out;
        out["transcript"] = t.text();
        out["peers"] = peers;
        out["submitted"] = t.submitted;
        out["committed"] = t.committed;
        out["rejected"] = t.rejected;
        out["mean_commit_latency_us"] = t.meanCommitLatencyUs();
        out["converged"] = t.converged();
        return out;
      },
      py::arg("scenario_json"), py::arg("out_dir") = py::none());

  m.def("audit_verify_chain", [](const std::filesystem::path& chain) { return reportDict(audit::verifyChain(chain)); });
  m.def("audit_replay", [](const std::filesystem::path& chain) { return reportDict(audit::replay(chain)); });
  m.def("audit_scan_pii", [](const std::vector<std::filesystem::path>& chains, const std::filesystem::path& pii) {
    return reportDict(audit::scanPii(chains, pii));
  });
  m.def("audit_forget_check",
        [](const std::filesystem::path& chain, const std::filesystem::path& pii, const std::string& pairKey) {
          return reportDict(audit::forgetCheck(chain, pii, pairKey));
        });

  py::class_<PyGateway>(m, "Gateway")
      .def(py::init<std::optional<std::filesystem::path>, int, std::optional<int>, int, std::uint64_t,
                    std::optional<std::pair<std::string, std::string>>>(),
           py::arg("data_dir") = py::none(), py::arg("peers") = 4, py::arg("quorum") = py::none(),
           py::arg("hash_iterations") = 100000, py::arg("seed") = 0, py::arg("admin") = py::none())
      .def("register_user", [](PyGateway& g, const std::string& body) {
        auto j = parse(body);
        return g.call([&](api::Gateway& gw) { return gw.registerUser(j); });
      })
      .def("register_company", [](PyGateway& g, const std::string& body) {
        auto j = parse(body);
        return g.call([&](api::Gateway& gw) { return gw.registerCompany(j); });
      })
      .def("login", [](PyGateway& g, const std::string& body) {
        auto j = parse(body);
        return g.call([&](api::Gateway& gw) { return gw.login(j); });
      })
      .def("logout", [](PyGateway& g, const std::string& token) {
        return g.call([&](api::Gateway& gw) { return gw.logout(token); });
      })
      .def("me", [](PyGateway& g, const std::string& token) {
        return g.call([&](api::Gateway& gw) { return gw.me(token); });
      })
      .def("put_company_profile", [](PyGateway& g, const std::string& token, const std::string& body) {
        auto j = parse(body);
        return g.call([&](api::Gateway& gw) { return gw.putCompanyProfile(token, j); });
      })
      .def("accredit", [](PyGateway& g, const std::string& token, const std::string& companyId,
                          const std::string& body) {
        auto j = parse(body);
        return g.call([&](api::Gateway& gw) { return gw.accredit(token, companyId, j); });
      })
      .def("admin_list_companies", [](PyGateway& g, const std::string& token) {
        return g.call([&](api::Gateway& gw) { return gw.adminListCompanies(token); });
      })
      .def("list_companies", [](PyGateway& g, const std::string& token) {
        return g.call([&](api::Gateway& gw) { return gw.listCompanies(token); });
      })
      .def("put_permission", [](PyGateway& g, const std::string& token, const std::string& companyId,
                                const std::string& body) {
        auto j = parse(body);
        return g.call([&](api::Gateway& gw) { return gw.putPermission(token, companyId, j); });
      })
      .def("list_permissions", [](PyGateway& g, const std::string& token) {
        return g.call([&](api::Gateway& gw) { return gw.listPermissions(token); });
      })
      .def("permission_history", [](PyGateway& g, const std::string& token, const std::string& companyId) {
        return g.call([&](api::Gateway& gw) { return gw.permissionHistory(token, companyId); });
      })
      .def("company_data", [](PyGateway& g, const std::string& token) {
        return g.call([&](api::Gateway& gw) { return gw.companyData(token); });
      })
      .def("delete_account", [](PyGateway& g, const std::string& token, const std::string& body) {
        auto j = parse(body);
        return g.call([&](api::Gateway& gw) { return gw.deleteAccount(token, j); });
      })
      .def("peer_state_hashes", [](PyGateway& g) {
        std::vector<std::string> out;
        const auto& net = g.gateway().network();
        for (std::size_t p = 0; p < net.peerCount(); ++p) out.push_back(net.peer(static_cast<int>(p)).stateHash());
        return out;
      });
}
