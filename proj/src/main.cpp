#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fbmgen/csvio.hpp"
#include "fbmgen/field.hpp"
#include "fbmgen/gaussian.hpp"
#include "fbmgen/kernels.hpp"
#include "fbmgen/manifest.hpp"
#include "fbmgen/pathgen.hpp"
#include "fbmgen/quadrature.hpp"
#include "fbmgen/rng.hpp"
#include "fbmgen/stats.hpp"

using namespace fbmgen;

namespace {

struct Options {
	double n = 8.0;
	std::vector<double> n_list;
	double hurst = 0.7;
	double s = 1.0;
	int replicas = 100;
	std::uint64_t seed = 0;
	int grid = 64;
	std::string variant = "standard";
	std::string integrator = "exact";
	std::string out = ".";
	std::string format = "csv";
	std::string config_file;
	std::string suite;
};

// every emitted file is tracked so a failing command leaves no partial output
struct OutputSet {
	std::string dir;
	std::vector<std::string> files;

	std::string path(const std::string& name) {
		std::string p = dir + "/" + name;
		files.push_back(p);
		return p;
	}
	void discard() {
		for (const std::string& f : files) std::remove(f.c_str());
	}
};

void add_common(CLI::App* cmd, Options& o, bool kernel_opts) {
	cmd->add_option("--hurst", o.hurst, "Hurst exponent");
	cmd->add_option("--replicas", o.replicas, "replica count");
	cmd->add_option("--seed", o.seed, "master seed");
	cmd->add_option("--grid", o.grid, "uniform time grid points on [0, 1]");
	cmd->add_option("--out", o.out, "output directory");
	cmd->add_option("--format", o.format, "paths output format")
	    ->check(CLI::IsMember({"csv", "json"}));
	cmd->add_option("--config", o.config_file, "JSON config file (flags take precedence)");
	if (kernel_opts) {
		cmd->add_option("--s", o.s, "kernel shift");
		cmd->add_option("--variant", o.variant, "kernel variant")
		    ->check(CLI::IsMember({"standard", "reflected"}));
		cmd->add_option("--integrator", o.integrator, "path integrator")
		    ->check(CLI::IsMember({"exact", "panel"}));
	}
}

void apply_config_file(CLI::App* cmd, Options& o) {
	if (o.config_file.empty()) return;
	std::ifstream in(o.config_file);
	if (!in) throw std::runtime_error("cannot open config file " + o.config_file);
	nlohmann::json j = nlohmann::json::parse(in);
	auto take = [&](const char* flag, const char* key, auto& field) {
		if (j.contains(key) && cmd->count(flag) == 0)
			field = j.at(key).get<std::decay_t<decltype(field)>>();
	};
	if (j.contains("n") && cmd->count("--n") == 0) {
		if (j.at("n").is_array())
			o.n_list = j.at("n").get<std::vector<double>>();
		else
			o.n = j.at("n").get<double>();
	}
	take("--hurst", "hurst", o.hurst);
	take("--replicas", "replicas", o.replicas);
	take("--seed", "seed", o.seed);
	take("--grid", "grid", o.grid);
	take("--out", "out", o.out);
	take("--format", "format", o.format);
	if (cmd->get_option_no_throw("--s")) {
		take("--s", "s", o.s);
		take("--variant", "variant", o.variant);
		take("--integrator", "integrator", o.integrator);
	}
}

ApproxConfig make_approx(const Options& o) {
	ApproxConfig c;
	c.n = o.n;
	c.kernel = {o.hurst, o.s};
	c.time_grid = default_time_grid(static_cast<std::size_t>(o.grid));
	c.variant = o.variant == "reflected" ? KernelVariant::reflected : KernelVariant::standard;
	c.integrator = o.integrator == "panel" ? Integrator::panel : Integrator::exact;
	c.replicas = o.replicas;
	c.seed = o.seed;
	c.validate();
	return c;
}

nlohmann::ordered_json merged_config(const Options& o, const std::string& command) {
	nlohmann::ordered_json j;
	j["command"] = command;
	if (command == "convergence")
		j["n"] = o.n_list;
	else if (command != "oracle")
		j["n"] = o.n;
	j["hurst"] = o.hurst;
	if (command != "oracle") {
		j["s"] = o.s;
		j["variant"] = o.variant;
		j["integrator"] = o.integrator;
	}
	j["replicas"] = o.replicas;
	j["seed"] = o.seed;
	j["grid"] = o.grid;
	j["format"] = o.format;
	if (!o.suite.empty()) j["suite"] = o.suite;
	return j;
}

RunManifest start_manifest(const Options& o, const std::string& command, int argc, char** argv,
                           bool kernel_consts) {
	RunManifest man;
	for (int i = 0; i < argc; ++i) {
		man.command += argv[i];
		if (i + 1 < argc) man.command += ' ';
	}
	man.master_seed = o.seed;
	man.config_json = merged_config(o, command).dump();
	if (kernel_consts) {
		KernelParams kp{o.hurst, o.s};
		BoundConstants bc = bound_constants(kp);
		man.constants = {{"c_H", kp.c()}, {"K1", bc.K1}, {"K2", bc.K2}, {"C", bc.C}, {"K", bc.K}};
	}
	return man;
}

void write_paths_json(const std::string& path, const std::vector<PathSample>& paths,
                      const std::vector<double>& grid) {
	nlohmann::ordered_json j;
	j["grid"] = grid;
	nlohmann::ordered_json arr = nlohmann::ordered_json::array();
	for (const PathSample& p : paths)
		arr.push_back({{"replica", p.replica_id}, {"values", p.values}});
	j["paths"] = arr;
	std::ofstream out(path);
	if (!out) throw std::runtime_error("cannot open " + path);
	out << j.dump(2) << "\n";
}

struct Check {
	std::string name;
	double value;
	double tol;
	bool pass;
};

int finish_verify(const Options& o, OutputSet& outs, RunManifest& man,
                  const std::vector<Check>& checks,
                  const std::chrono::steady_clock::time_point& t0) {
	bool all = true;
	nlohmann::ordered_json arr = nlohmann::ordered_json::array();
	for (const Check& c : checks) {
		all = all && c.pass;
		arr.push_back({{"check", c.name}, {"value", c.value}, {"tol", c.tol}, {"pass", c.pass}});
		if (!c.pass)
			std::cerr << "FAIL " << c.name << ": value " << format_double(c.value)
			          << " vs tol " << format_double(c.tol) << "\n";
	}
	nlohmann::ordered_json j;
	j["suite"] = o.suite;
	j["checks"] = arr;
	j["pass"] = all;
	std::string p = outs.path("verify_" + o.suite + ".json");
	{
		std::ofstream f(p);
		if (!f) throw std::runtime_error("cannot open " + p);
		f << j.dump(2) << "\n";
	}
	man.add_output(p);
	man.wall_seconds =
	    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
	man.write(outs.dir + "/manifest.json");
	std::cout << "verify " << o.suite << ": " << (all ? "pass" : "FAIL") << "\n";
	return all ? 0 : 2;
}

int cmd_simulate(const Options& o, int argc, char** argv) {
	auto t0 = std::chrono::steady_clock::now();
	ApproxConfig cfg = make_approx(o);
	RunManifest man = start_manifest(o, "simulate", argc, argv, true);
	OutputSet outs{o.out, {}};
	try {
		std::vector<PathSample> paths = simulate_paths(cfg);
		std::string p = o.format == "json" ? outs.path("paths.json") : outs.path("paths.csv");
		if (o.format == "json")
			write_paths_json(p, paths, cfg.time_grid);
		else
			write_paths_csv(p, paths, cfg.time_grid);
		man.add_output(p);
		man.wall_seconds =
		    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
		man.write(outs.dir + "/manifest.json");
		std::cout << "wrote " << p << " (" << paths.size() << " paths)\n";
		return 0;
	} catch (...) {
		outs.discard();
		throw;
	}
}

int cmd_oracle(const Options& o, int argc, char** argv) {
	auto t0 = std::chrono::steady_clock::now();
	OracleConfig cfg;
	cfg.H = o.hurst;
	cfg.time_grid = default_time_grid(static_cast<std::size_t>(o.grid));
	cfg.replicas = o.replicas;
	cfg.seed = o.seed;
	cfg.validate();
	RunManifest man = start_manifest(o, "oracle", argc, argv, false);
	OutputSet outs{o.out, {}};
	try {
		std::vector<PathSample> paths = fbm_exact_paths(cfg);
		std::string p =
		    o.format == "json" ? outs.path("oracle_paths.json") : outs.path("oracle_paths.csv");
		if (o.format == "json")
			write_paths_json(p, paths, cfg.time_grid);
		else
			write_paths_csv(p, paths, cfg.time_grid);
		man.add_output(p);
		man.wall_seconds =
		    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
		man.write(outs.dir + "/manifest.json");
		std::cout << "wrote " << p << " (" << paths.size() << " paths)\n";
		return 0;
	} catch (...) {
		outs.discard();
		throw;
	}
}

std::vector<Check> suite_kernel(const Options& o) {
	KernelParams kp{o.hurst, o.s};
	kp.validate();
	std::vector<Check> checks;

	double worst = 0.0;
	for (double t : {0.25, 0.5, 0.75, 1.0}) {
		double want = std::pow(t, 2.0 * kp.H);
		worst = std::max(worst, std::fabs(kernel_inner_product(t, t, kp) - want) / want);
	}
	checks.push_back({"normalization |kip(t,t)/t^2H - 1|", worst, 1e-3, worst < 1e-3});

	worst = 0.0;
	const double ts[4] = {0.25, 0.5, 0.75, 1.0};
	for (double t1 : ts)
		for (double t2 : ts)
			worst = std::max(worst, std::fabs(kernel_inner_product(t1, t2, kp) -
			                                  fbm_covariance(t1, t2, kp.H)));
	checks.push_back({"covariance identity sup", worst, 1e-3, worst < 1e-3});

	Rng rng(mix64(o.seed ^ 0x6b65726eull));
	worst = 0.0;
	for (int i = 0; i < 20000; ++i) {
		double t = rng.uniform(0.0, 3.0);
		double x = rng.uniform(0.0, 3.0);
		double y = rng.uniform(-4.0, 1.0);
		worst = std::max(worst, std::fabs(h_kernel(t, x, y) - h_kernel_quad(t, x, y)));
	}
	checks.push_back({"branch table vs quadrature sup", worst, 1e-8, worst < 1e-8});
	return checks;
}

std::vector<Check> suite_parity(const Options& o) {
	std::vector<Check> checks;
	const int kFields = 20000, kPairs = 5;
	for (double n : {1.0, 4.0}) {
		// rejection-sample five pairs per region
		Rng picker(mix64(o.seed ^ 0x70616972ull));
		std::vector<Point> queries;
		std::vector<double> exact;
		for (int region = 0; region < 4; ++region) {
			int found = 0;
			while (found < kPairs) {
				Point p1{picker.uniform(0.0, n), picker.uniform(-n, 0.0)};
				Point p2{picker.uniform(0.0, n), picker.uniform(-n, 0.0)};
				if (static_cast<int>(classify_pair(p1, p2)) != region) continue;
				queries.push_back(p1);
				queries.push_back(p2);
				exact.push_back(pair_correlation_exact(n, p1, p2));
				++found;
			}
		}
		const std::size_t cases = exact.size();
		std::vector<double> acc(cases, 0.0);
		Rng seeder(mix64(o.seed ^ 0x6669656cull));
		for (int rep = 0; rep < kFields; ++rep) {
			FieldConfig fc;
			fc.n = n;
			fc.seed = seeder.next_u64();
			PointField f = sample_field(fc);
			std::vector<int> par = f.parity_batch(queries);
			for (std::size_t k = 0; k < cases; ++k)
				acc[k] += static_cast<double>(par[2 * k] * par[2 * k + 1]);
		}
		int within = 0;
		for (std::size_t k = 0; k < cases; ++k) {
			double mean = acc[k] / kFields;
			// the product is +-1, so Var = 1 - rho^2
			double se = std::sqrt(std::max(1e-12, 1.0 - exact[k] * exact[k]) / kFields);
			if (std::fabs(mean - exact[k]) <= 3.0 * se) ++within;
		}
		checks.push_back({"parity n=" + format_double(n) + " cases within 3 SE",
		                  static_cast<double>(within), 18.0, within >= 18});
	}
	return checks;
}

std::vector<Check> suite_variance(const Options& o) {
	ApproxConfig cfg = make_approx(o);
	cfg.time_grid = {0.0, 1.0};
	if (cfg.replicas < 2) throw std::invalid_argument("variance suite needs --replicas >= 2");
	std::vector<PathSample> paths = simulate_paths(cfg);
	double m2 = 0.0, m4 = 0.0;
	for (const PathSample& p : paths) {
		double v = p.values[1] * p.values[1];
		m2 += v;
		m4 += v * v;
	}
	const double M = static_cast<double>(paths.size());
	m2 /= M;
	m4 /= M;
	double se_emp = std::sqrt(std::max(0.0, m4 - m2 * m2) / M);
	OracleEstimate est = variance_oracle(cfg, 1.0);
	double se = std::sqrt(se_emp * se_emp + est.stderr_ * est.stderr_);
	double z = std::fabs(m2 - est.value) / se;
	return {{"E[Y(1)^2] sim vs oracle |z|", z, 3.0, z < 3.0}};
}

std::vector<Check> suite_sheet(const Options& o) {
	// Brownian-sheet cell variances at n = 64 on the unit window
	const double n = 64.0;
	const int M = std::max(o.replicas, 2);
	const Point cells[3] = {{0.5, 0.5}, {1.0, 0.5}, {1.0, 1.0}};
	std::vector<Check> checks;
	std::vector<std::vector<double>> draws(3, std::vector<double>(M));
	Rng seeder(mix64(o.seed ^ 0x73686565ull));
	for (int r = 0; r < M; ++r) {
		FieldConfig fc;
		fc.n = n;
		fc.seed = seeder.next_u64();
		fc.windowed = true;
		fc.window = Rect{0.0, 1.0, -1.0, 0.0};
		PointField f = sample_field(fc);
		for (int c = 0; c < 3; ++c) draws[c][r] = sheet_approx(f, n, cells[c].x, cells[c].y);
	}
	for (int c = 0; c < 3; ++c) {
		double mu = 0.0;
		for (double v : draws[c]) mu += v;
		mu /= M;
		double var = 0.0;
		for (double v : draws[c]) var += (v - mu) * (v - mu);
		var /= M - 1;
		double want = cells[c].x * cells[c].y;
		double se = var * std::sqrt(2.0 / (M - 1));
		double z = std::fabs(var - want) / se;
		checks.push_back({"sheet var(" + format_double(cells[c].x) + "," +
		                      format_double(cells[c].y) + ") |z|",
		                  z, 3.0, z < 3.0});
	}
	return checks;
}

int cmd_verify(Options& o, int argc, char** argv) {
	auto t0 = std::chrono::steady_clock::now();
	RunManifest man = start_manifest(o, "verify", argc, argv, o.suite != "parity");
	OutputSet outs{o.out, {}};
	try {
		std::vector<Check> checks;
		if (o.suite == "kernel")
			checks = suite_kernel(o);
		else if (o.suite == "parity")
			checks = suite_parity(o);
		else if (o.suite == "variance")
			checks = suite_variance(o);
		else if (o.suite == "sheet")
			checks = suite_sheet(o);
		else
			throw CLI::ValidationError("suite must be one of kernel, parity, variance, sheet");
		return finish_verify(o, outs, man, checks, t0);
	} catch (...) {
		outs.discard();
		throw;
	}
}

int cmd_convergence(Options& o, int argc, char** argv) {
	auto t0 = std::chrono::steady_clock::now();
	if (o.n_list.empty()) o.n_list = {2.0, 4.0, 8.0, 16.0};
	if (o.replicas < 2) throw std::invalid_argument("convergence: --replicas must be >= 2");
	std::sort(o.n_list.begin(), o.n_list.end());
	RunManifest man = start_manifest(o, "convergence", argc, argv, true);
	OutputSet outs{o.out, {}};
	try {
		ConvergenceReport rep;
		std::vector<std::array<double, 6>> vrows;  // n, t, variance, limit, bound, margin
		for (std::size_t i = 0; i < o.n_list.size(); ++i) {
			Options oi = o;
			oi.n = o.n_list[i];
			ApproxConfig cfg = make_approx(oi);
			cfg.seed = mix64(o.seed) + i;  // independent ensembles per n
			std::vector<PathSample> paths = simulate_paths(cfg);
			CovarianceEstimate est = empirical_covariance(paths, cfg.time_grid);
			DeviationResult dev = covariance_deviation(est, o.hurst);
			std::vector<double> at1(paths.size());
			for (std::size_t r = 0; r < paths.size(); ++r) at1[r] = paths[r].values.back();
			double ks = paths.size() >= 100 ? gaussianity_test(at1, 0.0, 1.0)
			                                : std::nan("");
			double hurst = paths.size() >= 1000 ? hurst_estimate(paths, cfg.time_grid)
			                                    : std::nan("");
			BoundConstants bc = bound_constants(cfg.kernel);
			BoundReport br = bound_check(paths, cfg.time_grid, cfg.kernel, bc);
			for (std::size_t k = 0; k < cfg.time_grid.size(); ++k) {
				double t = cfg.time_grid[k];
				vrows.push_back({oi.n, t, est.cov_at(k, k), std::pow(t, 2.0 * o.hurst),
				                 bc.K * std::pow(t, 2.0 * o.hurst), br.margins[k]});
			}
			rep.rows.push_back({oi.n, dev.sup_norm, dev.mean_normalized, ks, hurst,
			                    br.min_margin, static_cast<int>(paths.size())});
			std::cout << "n = " << format_double(oi.n)
			          << ": sup_dev = " << format_double(dev.sup_norm) << "\n";
		}
		std::string ptxt = outs.path("report.txt");
		{
			std::ofstream f(ptxt);
			if (!f) throw std::runtime_error("cannot open " + ptxt);
			f << rep.table();
		}
		std::string pjson = outs.path("report.json");
		{
			std::ofstream f(pjson);
			if (!f) throw std::runtime_error("cannot open " + pjson);
			f << rep.json();
		}
		std::string pcsv = outs.path("convergence.csv");
		{
			CsvWriter w(pcsv);
			w.header({"n", "sup_dev", "mean_normalized_dev", "ks_p_t1", "hurst",
			          "bound_min_margin", "replicas"});
			for (const ConvergenceRow& r : rep.rows)
				w.row({CsvWriter::cell(r.n), CsvWriter::cell(r.sup_dev),
				       CsvWriter::cell(r.mean_normalized_dev), CsvWriter::cell(r.ks_p_t1),
				       CsvWriter::cell(r.hurst), CsvWriter::cell(r.bound_min_margin),
				       std::to_string(r.replicas)});
		}
		std::string pvar = outs.path("variance_bound.csv");
		{
			CsvWriter w(pvar);
			w.header({"n", "t", "variance", "limit", "bound", "margin"});
			for (const auto& r : vrows)
				w.row({CsvWriter::cell(r[0]), CsvWriter::cell(r[1]), CsvWriter::cell(r[2]),
				       CsvWriter::cell(r[3]), CsvWriter::cell(r[4]), CsvWriter::cell(r[5])});
		}
		man.add_output(ptxt);
		man.add_output(pjson);
		man.add_output(pcsv);
		man.add_output(pvar);
		man.wall_seconds =
		    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
		man.write(outs.dir + "/manifest.json");
		std::cout << rep.table();
		return 0;
	} catch (...) {
		outs.discard();
		throw;
	}
}

}  // namespace

int main(int argc, char** argv) {
	CLI::App app{"Poisson-parity approximation of fractional Brownian motion"};
	app.require_subcommand(1);
	Options o;

	CLI::App* sim = app.add_subcommand("simulate", "sample approximate fBm paths");
	sim->add_option("--n", o.n, "field intensity parameter");
	add_common(sim, o, true);

	CLI::App* orc = app.add_subcommand("oracle", "sample exact fBm paths (Cholesky)");
	add_common(orc, o, false);

	CLI::App* ver = app.add_subcommand("verify", "run an analytic-oracle check suite");
	ver->add_option("suite", o.suite, "kernel | parity | variance | sheet")->required();
	ver->add_option("--n", o.n, "field intensity parameter");
	add_common(ver, o, true);

	CLI::App* con = app.add_subcommand("convergence", "covariance deviation across n");
	con->add_option("--n", o.n_list, "comma-separated intensity list")->delimiter(',');
	add_common(con, o, true);

	CLI11_PARSE(app, argc, argv);

	try {
		CLI::App* cmd = app.get_subcommands().front();
		apply_config_file(cmd, o);
		std::filesystem::create_directories(o.out);
		if (cmd == sim) return cmd_simulate(o, argc, argv);
		if (cmd == orc) return cmd_oracle(o, argc, argv);
		if (cmd == ver) return cmd_verify(o, argc, argv);
		return cmd_convergence(o, argc, argv);
	} catch (const std::exception& e) {
		std::cerr << "error: " << e.what() << "\n";
		return 1;
	}
}
