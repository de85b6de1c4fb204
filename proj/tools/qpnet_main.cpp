#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "qpnet/realize.hpp"
#include "qpnet/rng.hpp"
#include "qpnet/serialize.hpp"
#include "qpnet/verify.hpp"

namespace {

using namespace qpnet;

EncoderSpec make_encoder_arg(const std::string& arg, std::size_t capacity,
                             std::size_t grid_hint = 0) {
  if (arg == "dyadic") return dyadic_point_eval(capacity);
  if (arg == "fourier")
    return fourier_functionals(capacity, grid_hint >= 3 ? grid_hint : 1001);
  return encoder_from_json(json::parse(read_text_file(arg)));
}

TargetSpec parse_target_arg(const std::string& arg) {
  if (arg.rfind("point:", 0) == 0)
    return {TargetKind::PointEval, std::stod(arg.substr(6))};
  return {target_kind_from_name(arg), 0.0};
}

int cmd_gen(const std::string& family, const std::string& out, std::size_t modes, double bound,
            std::size_t grid, std::size_t count, std::uint64_t seed, const std::string& target,
            const std::string& split, const std::string& emit_targets) {
  if (family != "fourier") throw std::runtime_error("unknown family: " + family);
  FamilySpec fam;
  fam.modes = modes;
  fam.bound = bound;
  fam.grid = grid;
  fam.count = count;
  fam.seed = seed;
  Dataset ds = gen_fourier_family(fam);
  ds.meta.split = split;
  attach_target(ds, parse_target_arg(target));
  write_dataset_jsonl(ds, out);
  if (!emit_targets.empty()) {
    Dataset targets;
    targets.meta = ds.meta;
    targets.meta.target = "none";
    for (const auto& r : ds.records) {
      if (!r.function_target) throw std::runtime_error("--emit-targets needs a function target");
      Record t;
      t.id = r.id;
      t.x = *r.function_target;
      targets.records.push_back(std::move(t));
    }
    write_dataset_jsonl(targets, emit_targets);
  }
  std::cout << "wrote " << ds.records.size() << " records to " << out << "\n";
  return 0;
}

int cmd_fit(const std::string& config_path, const std::string& data_path,
            const std::string& out, const std::string& loss_csv) {
  ConfigFile cfg = load_config(config_path);
  const std::size_t truncation = static_cast<std::size_t>(cfg.get_num("model", "truncation", 16));
  const std::size_t neurons = static_cast<std::size_t>(cfg.get_num("model", "neurons", 32));
  GateKind gate = cfg.get_str("model", "gate", "gated_tanh") == "relu_tanh"
                      ? GateKind::ReluTanh
                      : GateKind::GatedTanh;
  const double psi_scale = cfg.get_num("model", "psi_scale", 1.0);

  Dataset ds = read_dataset_jsonl(data_path);
  if (ds.records.empty()) throw std::runtime_error("fit: dataset is empty");
  const std::size_t grid_hint = ds.records[0].x.grid.size();
  auto enc = std::make_shared<const EncoderSpec>(
      make_encoder_arg(cfg.get_str("model", "encoder", "dyadic"), truncation, grid_hint));

  RankOneActivation act = default_rank_one(truncation, gate);
  for (auto& v : act.psi) v *= psi_scale;

  TrainConfig tc;
  if (cfg.get_str("optimizer", "kind", "adam") == "sgd")
    tc.optimizer = SgdConfig{cfg.get_num("optimizer", "lr", 1e-3)};
  else
    tc.optimizer = AdamConfig{cfg.get_num("optimizer", "lr", 1e-3),
                              cfg.get_num("optimizer", "beta1", 0.9),
                              cfg.get_num("optimizer", "beta2", 0.999),
                              cfg.get_num("optimizer", "eps", 1e-8)};
  tc.steps = static_cast<std::size_t>(cfg.get_num("optimizer", "steps", 1000));
  tc.batch_size = static_cast<std::size_t>(cfg.get_num("optimizer", "batch_size", 32));
  tc.seed = static_cast<std::uint64_t>(cfg.get_num("optimizer", "seed", 0));

  const std::string target_mode = cfg.get_str("data", "target", "scalar");
  std::mt19937_64 init_rng(derive_seed(tc.seed, 1));
  FitResult res;
  json model_json;

  if (target_mode == "scalar") {
    std::vector<ScalarSample> data;
    for (const auto& r : ds.records) {
      if (!r.scalar_target) throw std::runtime_error("record " + r.id + " has no scalar target");
      data.push_back({encode(*enc, r.x, truncation), *r.scalar_target});
    }
    ScalarNet net = init_scalar_net(truncation, neurons, act, enc, init_rng);
    res = fit(net, data, tc);
    model_json = model_to_json(net);
  } else {
    std::vector<VectorSample> data;
    std::size_t out_dim = 0;
    if (target_mode == "vector") {
      for (const auto& r : ds.records) {
        if (!r.vector_target) throw std::runtime_error("record " + r.id + " has no vector target");
        data.push_back({encode(*enc, r.x, truncation), *r.vector_target});
      }
      out_dim = data[0].target.size();
    } else if (target_mode == "encoded_function") {
      const std::size_t k =
          static_cast<std::size_t>(cfg.get_num("data", "target_truncation", truncation));
      auto tgt_enc = std::make_shared<const EncoderSpec>(
          make_encoder_arg(cfg.get_str("data", "target_encoder", "dyadic"), k, grid_hint));
      for (const auto& r : ds.records) {
        if (!r.function_target)
          throw std::runtime_error("record " + r.id + " has no function target");
        data.push_back(
            {encode(*enc, r.x, truncation), encode(*tgt_enc, *r.function_target, k).coords});
      }
      out_dim = k;
    } else {
      throw std::runtime_error("unknown [data] target mode: " + target_mode);
    }
    const std::size_t components =
        static_cast<std::size_t>(cfg.get_num("model", "components", 8));
    VectorNet vnet = init_vector_net(truncation, neurons, components, out_dim,
                                     act, enc, init_rng);
    res = fit(vnet, data, tc);
    model_json = model_to_json(vnet);
  }

  if (res.diverged) {
    std::cerr << "fit diverged (non-finite loss/update) at step " << res.divergence_step << "\n";
    return 2;
  }
  write_text_file(out, model_json.dump(2) + "\n");
  if (!loss_csv.empty()) write_loss_csv(res.loss_history, loss_csv);
  std::cout << "fit: " << res.loss_history.size() << " steps, final batch loss "
            << (res.loss_history.empty() ? 0.0 : res.loss_history.back()) << ", model " << out
            << "\n";
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path,
             const std::string& report_path, double assert_max_err) {
  LoadedModel model = model_from_json(json::parse(read_text_file(model_path)));
  Dataset ds = read_dataset_jsonl(data_path);
  json records = json::array();
  double mse = 0.0, max_err = 0.0;
  std::size_t count = 0;

  if (const auto* net = std::get_if<ScalarNet>(&model)) {
    if (!net->encoder) throw std::runtime_error("eval: model has no encoder");
    for (const auto& r : ds.records) {
      if (!r.scalar_target) throw std::runtime_error("record " + r.id + " has no scalar target");
      double pred = forward_scalar(*net, encode(*net->encoder, r.x, net->truncation));
      double err = pred - *r.scalar_target;
      mse += err * err;
      max_err = std::max(max_err, std::abs(err));
      records.push_back({{"id", r.id}, {"pred", pred}, {"target", *r.scalar_target},
                         {"abs_err", std::abs(err)}});
      ++count;
    }
  } else {
    const auto& vnet = std::get<VectorNet>(model);
    const auto& enc = vnet.components.at(0).encoder;
    if (!enc) throw std::runtime_error("eval: model has no encoder");
    for (const auto& r : ds.records) {
      if (!r.vector_target) throw std::runtime_error("record " + r.id + " has no vector target");
      Vec pred = forward_vector(vnet, encode(*enc, r.x, vnet.components[0].truncation));
      double err = std::sqrt(sq_dist(pred, *r.vector_target));
      mse += err * err;
      max_err = std::max(max_err, err);
      records.push_back({{"id", r.id}, {"err", err}});
      ++count;
    }
  }
  if (count == 0) throw std::runtime_error("eval: empty dataset");
  json rep;
  rep["count"] = count;
  rep["mse"] = mse / static_cast<double>(count);
  rep["max_abs_err"] = max_err;
  rep["records"] = std::move(records);
  write_text_file(report_path, rep.dump(2) + "\n");
  std::cout << "eval: n=" << count << " mse=" << mse / static_cast<double>(count)
            << " max_abs_err=" << max_err << "\n";
  if (assert_max_err > 0.0 && max_err >= assert_max_err) {
    std::cerr << "max_abs_err " << max_err << " exceeds --assert-max-err " << assert_max_err
              << "\n";
    return 1;
  }
  return 0;
}

int cmd_embed(const std::string& encoder_path, const std::string& data_path, std::size_t n,
              const std::string& out) {
  EncoderSpec enc = make_encoder_arg(encoder_path, n);
  Dataset ds = read_dataset_jsonl(data_path);
  std::string buffer;
  bool all_ok = true;
  for (const auto& r : ds.records) {
    CubePoint z = encode(enc, r.x, n);
    CubeReport rep = verify_cube(z);
    if (!rep.ok) {
      all_ok = false;
      std::cerr << "cube violation for record " << r.id << "\n";
    }
    json j;
    j["id"] = r.id;
    j["coords"] = z.coords;
    buffer += j.dump() + "\n";
  }
  write_text_file(out, buffer);
  std::cout << "embedded " << ds.records.size() << " records at N=" << n << " into " << out
            << "\n";
  return all_ok ? 0 : 1;
}

int cmd_codebook(const std::string& data_path, const std::string& encoder_path, std::size_t n,
                 double epsilon, const std::string& out) {
  EncoderSpec enc = make_encoder_arg(encoder_path, n);
  Dataset ds = read_dataset_jsonl(data_path);
  std::vector<CodebookPoint> points;
  for (const auto& r : ds.records) {
    const FunctionSample& target = r.function_target ? *r.function_target : r.x;
    points.push_back({encode(enc, target, n).coords, r.id, target});
  }
  Codebook cb = build_codebook(points, epsilon);
  write_text_file(out, codebook_to_json(cb).dump(2) + "\n");
  std::cout << "codebook: R=" << cb.size() << " covering_radius=" << cb.covering_radius
            << " (epsilon " << epsilon << ") -> " << out << "\n";
  return cb.covering_radius <= epsilon ? 0 : 1;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, const std::string& report_path) {
  VerifyReport rep = run_verify(suite, seed);
  json checks = json::array();
  for (const auto& c : rep.checks) {
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name
              << (c.informational ? " (informational)" : "")
              << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
    checks.push_back({{"name", c.name},
                      {"pass", c.pass},
                      {"informational", c.informational},
                      {"detail", c.detail}});
  }
  json j;
  j["suite"] = rep.suite;
  j["seed"] = rep.seed;
  j["pass"] = rep.pass();
  j["checks"] = std::move(checks);
  if (!report_path.empty()) write_text_file(report_path, j.dump(2) + "\n");
  std::cout << (rep.pass() ? "verify: all checks passed" : "verify: FAILURES present") << "\n";
  return rep.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qpnet: separating-sequence encoders, projected networks and "
               "quasi-Polish prediction pipelines"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic functional dataset");
  std::string gen_family = "fourier", gen_out, gen_target = "integral", gen_split,
              gen_emit_targets;
  std::size_t gen_modes = 3, gen_grid = 1001, gen_count = 256;
  double gen_bound = 1.0;
  std::uint64_t gen_seed = 42;
  gen->add_option("--family", gen_family, "family name (fourier)");
  gen->add_option("--modes", gen_modes, "number of Fourier modes");
  gen->add_option("--bound", gen_bound, "coefficient bound c");
  gen->add_option("--grid", gen_grid, "grid size G");
  gen->add_option("--count", gen_count, "number of records");
  gen->add_option("--seed", gen_seed, "master seed");
  gen->add_option("--target", gen_target,
                  "target: none|integral|point:T0|square_integral|square_operator");
  gen->add_option("--split", gen_split, "split tag stored in metadata");
  gen->add_option("--emit-targets", gen_emit_targets,
                  "also write function targets as their own JSONL");
  gen->add_option("--out", gen_out, "output JSONL path")->required();

  // fit
  auto* fitc = app.add_subcommand("fit", "train a model from a config file");
  std::string fit_config, fit_data, fit_out, fit_loss_csv;
  fitc->add_option("--config", fit_config, "run config (TOML-style)")->required();
  fitc->add_option("--data", fit_data, "training JSONL")->required();
  fitc->add_option("--out", fit_out, "output model JSON")->required();
  fitc->add_option("--loss-csv", fit_loss_csv, "write per-step loss CSV here");

  // eval
  auto* evalc = app.add_subcommand("eval", "evaluate a model on a dataset");
  std::string eval_model, eval_data, eval_report;
  double eval_assert = 0.0;
  evalc->add_option("--model", eval_model)->required();
  evalc->add_option("--data", eval_data)->required();
  evalc->add_option("--report", eval_report)->required();
  evalc->add_option("--assert-max-err", eval_assert,
                    "exit nonzero when max abs error reaches this");

  // embed
  auto* embedc = app.add_subcommand("embed", "encode records into the Hilbert cube");
  std::string embed_encoder = "dyadic", embed_data, embed_out;
  std::size_t embed_n = 16;
  embedc->add_option("--encoder", embed_encoder, "encoder JSON path or 'dyadic'");
  embedc->add_option("--data", embed_data)->required();
  embedc->add_option("--n", embed_n, "truncation level");
  embedc->add_option("--out", embed_out)->required();

  // codebook
  auto* cbc = app.add_subcommand("codebook", "build a greedy epsilon-net codebook");
  std::string cb_data, cb_encoder = "dyadic", cb_out;
  std::size_t cb_n = 16;
  double cb_eps = 0.1;
  cbc->add_option("--data", cb_data, "JSONL of targets (records or function targets)")
      ->required();
  cbc->add_option("--encoder", cb_encoder, "target encoder JSON path or 'dyadic'");
  cbc->add_option("--n", cb_n, "target truncation level");
  cbc->add_option("--epsilon", cb_eps, "cover radius epsilon")->required();
  cbc->add_option("--out", cb_out)->required();

  // verify
  auto* verc = app.add_subcommand("verify", "run the invariant verification suites");
  std::string ver_suite = "all", ver_report;
  std::uint64_t ver_seed = 42;
  verc->add_option("--suite", ver_suite,
                   "all|embed|activation|net|quantize|realize|train|uap");
  verc->add_option("--seed", ver_seed);
  verc->add_option("--report", ver_report, "write JSON report here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_gen(gen_family, gen_out, gen_modes, gen_bound, gen_grid, gen_count, gen_seed,
                     gen_target, gen_split, gen_emit_targets);
    if (fitc->parsed()) return cmd_fit(fit_config, fit_data, fit_out, fit_loss_csv);
    if (evalc->parsed()) return cmd_eval(eval_model, eval_data, eval_report, eval_assert);
    if (embedc->parsed()) return cmd_embed(embed_encoder, embed_data, embed_n, embed_out);
    if (cbc->parsed()) return cmd_codebook(cb_data, cb_encoder, cb_n, cb_eps, cb_out);
    if (verc->parsed()) return cmd_verify(ver_suite, ver_seed, ver_report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
