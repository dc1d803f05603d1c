#include <epicert/epicert.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace epicert;

namespace {

enum Exit { kOk = 0, kFail = 1, kUsage = 2, kCap = 3 };

struct ProblemArgs {
    std::string kind = "dmn";
    int m = 3;
    int n = 1;
    bool general = false;

    void add(CLI::App* app)
    {
        app->add_option("kind,--kind", kind, "dmn or costa")->check(CLI::IsMember({"dmn", "costa"}));
        app->add_option("--m", m, "derivative order")->check(CLI::Range(1, 8));
        app->add_option("--n", n, "dimension")->check(CLI::Range(1, kMaxDim));
        app->add_flag("--general", general, "Costa for every n via the symmetric pair problem");
    }

    TargetProblem target() const
    {
        if (kind == "costa") return general ? costa_general_target() : costa_target(n);
        if (general) throw CLI::ValidationError("--general", "only valid with costa");
        if (m < 2) throw CLI::ValidationError("--m", "must be at least 2 for dmn");
        return dmn_target(m, n);
    }
};

std::string default_out(const TargetProblem& tp)
{
    switch (tp.kind) {
    case TargetKind::Dmn: return "d" + std::to_string(tp.m) + "_" + std::to_string(tp.n) + ".cert";
    case TargetKind::CostaConcrete: return "costa" + std::to_string(tp.n) + ".cert";
    case TargetKind::CostaGeneral: return "costa_general.cert";
    }
    return "certificate.cert";
}

void print_stats(std::ostream& os, const std::string& id, const ReductionStats& s)
{
    os << id << "  Vars=" << s.vars << "  N1=" << s.raw << "  C1=" << s.c1 << "  C2=" << s.c2
       << "  intrinsic=" << s.intrinsic << "  N2=" << s.n2 << "\n";
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<Rational> parse_list(const std::string& s)
{
    std::vector<Rational> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(parse_rational(tok));
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact SOS certificates for entropy derivative inequalities"};
    app.require_subcommand(1);
    std::size_t cap = generation_cap();
    app.add_option("--cap", cap, "limit on generated constraints");

    ProblemArgs prove_args;
    ProveOptions opt;
    double den_bound = 1e9;
    std::string out_path;
    auto* prove_cmd = app.add_subcommand("prove", "search for and verify a certificate");
    prove_args.add(prove_cmd);
    prove_cmd->add_option("--tol", opt.tol, "interior point tolerance");
    prove_cmd->add_option("--margin", opt.margin, "smallest accepted eigenvalue margin");
    prove_cmd->add_option("--max-iters", opt.max_iters, "interior point iteration limit");
    prove_cmd->add_option("--seed", opt.seed, "seed (the solver is deterministic)");
    prove_cmd->add_option("--den-bound", den_bound, "largest rounding denominator");
    prove_cmd->add_option("--out", out_path, "certificate file");
    prove_cmd->add_option("--dump-sdpa", opt.sdpa_path, "write the numeric SDP in SDPA format");
    prove_cmd->add_flag("-v,--verbose", opt.verbose, "solver trace");

    std::string verify_path;
    auto* verify_cmd = app.add_subcommand("verify", "check a certificate file exactly");
    verify_cmd->add_option("file", verify_path, "certificate")->required();

    ProblemArgs stats_args;
    auto* stats_cmd = app.add_subcommand("stats", "basis and constraint counts");
    stats_args.add(stats_cmd);
    auto* reduce_cmd = app.add_subcommand("reduce", "alias of stats");
    ProblemArgs reduce_args;
    reduce_args.add(reduce_cmd);
    reduce_cmd->add_flag("--report", "print the count table");

    ProblemArgs export_args;
    std::string export_path;
    auto* export_cmd = app.add_subcommand("export", "write the numeric SDP in SDPA format");
    export_args.add(export_cmd);
    export_cmd->add_option("--out", export_path, "SDPA file")->required();

    ProblemArgs target_args;
    bool reduced = false;
    auto* target_cmd = app.add_subcommand("target", "print the target form");
    target_args.add(target_cmd);
    target_cmd->add_flag("--reduced", reduced, "print the quadratic form left after elimination");

    int cm = 3, cn = 1;
    bool dump = false;
    auto* cons_cmd = app.add_subcommand("constraints", "generate the constraint suite");
    cons_cmd->add_option("--m", cm, "order")->check(CLI::Range(2, 8));
    cons_cmd->add_option("--n", cn, "dimension")->check(CLI::Range(1, kMaxDim));
    cons_cmd->add_flag("--dump", dump, "print every constraint with its provenance");

    int om = 3, on = 1;
    std::string variances;
    auto* oracle_cmd = app.add_subcommand("oracle", "exact Gaussian integrals of the target and the constraints");
    oracle_cmd->add_option("--m", om, "order")->check(CLI::Range(1, 8));
    oracle_cmd->add_option("--n", on, "dimension")->check(CLI::Range(1, kMaxDim));
    oracle_cmd->add_option("--variances", variances, "comma separated, e.g. 1,2,5/3")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    generation_cap() = cap;

    try {
        if (*prove_cmd) {
            TargetProblem tp = prove_args.target();
            opt.den_ladder.erase(std::remove_if(opt.den_ladder.begin(), opt.den_ladder.end(),
                                                [&](const Integer& d) { return d.get_d() > den_bound; }),
                                 opt.den_ladder.end());
            if (opt.den_ladder.empty() || opt.den_ladder.back().get_d() < den_bound) opt.den_ladder.emplace_back(den_bound);
            ProveReport r = prove(tp, opt);
            print_stats(std::cout, tp.id(), r.stats);
            std::cout << "sdp " << to_string(r.sdp_status) << "  iterations=" << r.iterations << "  lambda=" << r.lambda << "\n";
            if (r.status != ProveStatus::Proved) {
                const char* stage = r.status == ProveStatus::RoundingFailed ? "rounding" : "sdp";
                if (r.message.find("quadratic") != std::string::npos) stage = "elimination";
                std::cout << "status " << to_string(r.status) << "\nstage " << stage << "\nreason " << r.message << "\n";
                return kFail;
            }
            std::string path = out_path.empty() ? default_out(tp) : out_path;
            std::ofstream f(path, std::ios::binary);
            f << serialize(*r.certificate);
            std::cout << "rounding " << r.rounding << "\n";
            std::cout << "status proved\ncertificate " << path << "\ntime " << r.seconds << " s\n";
            return kOk;
        }
        if (*verify_cmd) {
            Certificate c;
            try {
                c = parse_certificate(read_file(verify_path));
            } catch (const std::exception& e) {
                std::cout << "invalid: " << e.what() << "\n";
                return kFail;
            }
            auto v = verify(c);
            std::cout << c.problem_id() << ": " << (v.ok ? "verified" : "rejected: " + v.message) << "\n";
            return v.ok ? kOk : kFail;
        }
        if (*stats_cmd || *reduce_cmd) {
            const ProblemArgs& a = *stats_cmd ? stats_args : reduce_args;
            TargetProblem tp = a.target();
            auto t0 = std::chrono::steady_clock::now();
            Prepared pr = prepare(tp);
            double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            print_stats(std::cout, tp.id(), pr.reduction->stats());
            std::cerr << "time " << secs << " s\n";
            return kOk;
        }
        if (*export_cmd) {
            TargetProblem tp = export_args.target();
            Prepared pr = prepare(tp);
            if (!pr.error.empty()) {
                std::cout << pr.error << "\n";
                return kFail;
            }
            std::ofstream f(export_path);
            f << to_sdpa(pr.exact->numeric());
            std::cout << "wrote " << export_path << " (" << pr.exact->blocks() << " blocks, " << pr.exact->vars.size()
                      << " variables)\n";
            return kOk;
        }
        if (*target_cmd) {
            TargetProblem tp = target_args.target();
            int nd = tp.kind == TargetKind::CostaGeneral ? 2 : tp.n;
            if (!reduced) {
                for (const auto& b : tp.blocks) {
                    std::cout << pretty(b.base, nd) << "\n";
                    for (const auto& [name, f] : b.params) std::cout << "  + " << name << " * (" << pretty(f, nd) << ")\n";
                }
                return kOk;
            }
            Prepared pr = prepare(tp);
            if (!pr.error.empty()) {
                std::cout << pr.error << "\n";
                return kFail;
            }
            const auto& qb = pr.reduction->basis();
            for (std::size_t i = 0; i < qb.monomials().size(); ++i)
                std::cout << "m" << i + 1 << " = " << pretty(qb.monomials()[i], nd) << "\n";
            for (const auto& q : pr.quad_targets) std::cout << pretty(qb.expand(q.base), nd) << "\n";
            return kOk;
        }
        if (*cons_cmd) {
            auto suite = constraint_suite(cm, cn);
            std::cout << suite.size() << " constraints\n";
            if (dump)
                for (const auto& c : suite) std::cout << to_string(c.prov) << "\n  " << pretty(c.form, cn) << "\n";
            return kOk;
        }
        if (*oracle_cmd) {
            DiagonalGaussian g{parse_list(variances)};
            if (g.n() != on) throw CLI::ValidationError("--variances", "need one variance per dimension");
            GaussianOracle o(g);
            std::cout << "F value " << o.expectation(build_F(om, on), om).get_str() << "\n";
            if (om >= 2) {
                auto suite = constraint_suite(om, on);
                std::size_t bad = 0;
                for (const auto& c : suite)
                    if (o.expectation(c.form, c.m) != 0) ++bad;
                std::cout << "constraints " << suite.size() << " nonzero " << bad << "\n";
                return bad == 0 ? kOk : kFail;
            }
            return kOk;
        }
    } catch (const ResourceLimitExceeded& e) {
        std::cout << "resource cap: " << e.what() << "\n";
        return kCap;
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFail;
    }
    return kUsage;
}
