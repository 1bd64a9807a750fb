// Command-line surface.  Exit codes: 0 success, 2 validation/parse failure,
// 3 genericity retries exhausted.  All subcommands accept --format json.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <lrval/lrval.hpp>

namespace {

using nlohmann::json;
using namespace lrval;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string partition_line(const RPartition& p) {
  std::string s;
  for (int i = 0; i < p.length(); ++i) {
    if (i) s += " ";
    s += rat_str(p[i]);
  }
  return s;
}

// "p/q" with '/' replaced by '_' for file names
std::string rat_file_token(const Rat& q) {
  std::string s = rat_str(q.get_num()) + "_" + rat_str(q.get_den());
  return s;
}

struct Options {
  std::string format = "text";
  std::uint64_t seed = 1;
};

void emit_filling(const LRFilling& F, const Options& opt) {
  if (opt.format == "json")
    std::cout << filling_to_json(F).dump(2) << "\n";
  else
    std::cout << filling_to_string(F);
}

int run(int argc, char** argv) {
  CLI::App app{"Exact LR fillings of matrix pairs over an R-valuation ring"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--format", opt.format, "output format: text or json")
      ->check(CLI::IsMember({"text", "json"}));
  app.add_option("--seed", opt.seed, "seed for randomized reductions");

  // inv <matrix-file>
  std::string inv_file;
  auto* cmd_inv = app.add_subcommand("inv", "invariant partition of a matrix");
  cmd_inv->add_option("matrix", inv_file)->required();

  // right-fill / left-fill <M> <N>
  std::string rf_m, rf_n, lf_m, lf_n;
  auto* cmd_rfill = app.add_subcommand("right-fill", "right filling of a pair");
  cmd_rfill->add_option("M", rf_m)->required();
  cmd_rfill->add_option("N", rf_n)->required();
  auto* cmd_lfill = app.add_subcommand("left-fill", "left filling of a pair");
  cmd_lfill->add_option("M", lf_m)->required();
  cmd_lfill->add_option("N", lf_n)->required();

  // build <filling-file>
  std::string build_file;
  auto* cmd_build = app.add_subcommand("build", "matrices realizing a filling");
  cmd_build->add_option("filling", build_file)->required();

  // roundtrip <filling-file>
  std::string rt_file;
  auto* cmd_rt = app.add_subcommand("roundtrip", "build then re-extract a filling");
  cmd_rt->add_option("filling", rt_file)->required();

  // sequence <M> <N> --side
  std::string seq_m, seq_n, seq_side = "right";
  auto* cmd_seq = app.add_subcommand("sequence", "invariant sequence of a pair");
  cmd_seq->add_option("M", seq_m)->required();
  cmd_seq->add_option("N", seq_n)->required();
  cmd_seq->add_option("--side", seq_side)->check(CLI::IsMember({"left", "right"}));

  // sweep <M> <N> --side --strip [--frames dir]
  std::string sw_m, sw_n, sw_side = "nu", sw_frames;
  int sw_strip = 1;
  auto* cmd_sweep = app.add_subcommand("sweep", "Ordering-Lemma deformation sweep");
  cmd_sweep->add_option("M", sw_m)->required();
  cmd_sweep->add_option("N", sw_n)->required();
  cmd_sweep->add_option("--side", sw_side)->check(CLI::IsMember({"mu", "nu"}));
  cmd_sweep->add_option("--strip", sw_strip)->required();
  cmd_sweep->add_option("--frames", sw_frames, "directory for SVG frames");

  // count <mu> <nu> <lambda>
  std::string cnt_mu, cnt_nu, cnt_lambda;
  auto* cmd_count = app.add_subcommand("count", "integer LR filling count");
  cmd_count->add_option("mu", cnt_mu)->required();
  cmd_count->add_option("nu", cnt_nu)->required();
  cmd_count->add_option("lambda", cnt_lambda)->required();

  // shift <filling> --alpha --side
  std::string sh_file, sh_alpha = "0", sh_side = "right";
  auto* cmd_shift = app.add_subcommand("shift", "scalar-shift a filling");
  cmd_shift->add_option("filling", sh_file)->required();
  cmd_shift->add_option("--alpha", sh_alpha)->required();
  cmd_shift->add_option("--side", sh_side)->check(CLI::IsMember({"left", "right"}));

  // check <filling | M N>
  std::vector<std::string> chk_files;
  auto* cmd_check = app.add_subcommand("check", "validate a filling or certify a pair");
  cmd_check->add_option("files", chk_files)->expected(1, 2);

  // render <filling> --format {ascii,svg}
  std::string rn_file, rn_format = "ascii";
  auto* cmd_render = app.add_subcommand("render", "render a filling diagram");
  cmd_render->add_option("filling", rn_file)->required();
  cmd_render->add_option("--format", rn_format)->check(CLI::IsMember({"ascii", "svg"}));

  CLI11_PARSE(app, argc, argv);

  if (cmd_inv->parsed()) {
    const RPartition p = invariant_partition(matrix_parse(slurp(inv_file)));
    if (opt.format == "json")
      std::cout << partition_to_json(p).dump() << "\n";
    else
      std::cout << partition_line(p) << "\n";
    return 0;
  }

  if (cmd_rfill->parsed() || cmd_lfill->parsed()) {
    const bool right = cmd_rfill->parsed();
    const ValMatrix M = matrix_parse(slurp(right ? rf_m : lf_m));
    const ValMatrix N = matrix_parse(slurp(right ? rf_n : lf_n));
    const LRFilling F = right ? right_filling(M, N, opt.seed) : left_filling(M, N, opt.seed);
    emit_filling(F, opt);
    return 0;
  }

  if (cmd_build->parsed()) {
    const LRFilling F = filling_parse(slurp(build_file));
    const FillingRealization R = matrices_from_filling(F);
    if (opt.format == "json") {
      json j;
      j["M"] = matrix_to_string(R.M);
      j["factors"] = json::array();
      for (const auto& f : R.factors) j["factors"].push_back(matrix_to_string(f));
      j["N"] = matrix_to_string(R.N);
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << "M:\n" << matrix_to_string(R.M);
      for (size_t i = 0; i < R.factors.size(); ++i)
        std::cout << "N" << (i + 1) << ":\n" << matrix_to_string(R.factors[i]);
      std::cout << "N:\n" << matrix_to_string(R.N);
    }
    return 0;
  }

  if (cmd_rt->parsed()) {
    const LRFilling F = filling_parse(slurp(rt_file));
    const FillingRealization R = matrices_from_filling(F);
    const LRFilling F2 = right_filling(R.M, R.N, opt.seed);
    if (F2 == F) {
      if (opt.format == "json")
        std::cout << json{{"ok", true}}.dump() << "\n";
      else
        std::cout << "OK: filling reproduced exactly\n";
      return 0;
    }
    if (opt.format == "json")
      std::cout << json{{"ok", false}, {"extracted", filling_to_json(F2)}}.dump() << "\n";
    else
      std::cout << "FAIL: extraction differs\n" << filling_to_string(F2);
    return 2;
  }

  if (cmd_seq->parsed()) {
    const ValMatrix M = matrix_parse(slurp(seq_m));
    const ValMatrix N = matrix_parse(slurp(seq_n));
    const GenericForm G = to_mu_nuhat_generic(M, N, opt.seed);
    const auto seq =
        seq_side == "right" ? invariant_sequence_right(G) : invariant_sequence_left(G);
    if (opt.format == "json") {
      json arr = json::array();
      for (const auto& p : seq) arr.push_back(partition_to_json(p));
      std::cout << arr.dump(2) << "\n";
    } else {
      for (const auto& p : seq) std::cout << partition_line(p) << "\n";
    }
    return 0;
  }

  if (cmd_sweep->parsed()) {
    const ValMatrix M = matrix_parse(slurp(sw_m));
    const ValMatrix N = matrix_parse(slurp(sw_n));
    const GenericForm G = to_mu_nuhat_generic(M, N, opt.seed);
    const DeformationTrace trace =
        sweep(G, sw_side == "mu" ? SweepSide::Mu : SweepSide::Nu, sw_strip);
    if (opt.format == "json") {
      json j;
      j["side"] = sw_side;
      j["strip"] = sw_strip;
      j["breakpoints"] = json::array();
      for (const auto& b : trace.breakpoints)
        j["breakpoints"].push_back({{"beta", rat_str(b.beta)}, {"j", b.j}});
      j["segments"] = json::array();
      for (const auto& s : trace.segments) {
        json seg;
        seg["beta_hi"] = rat_str(s.beta_hi);
        seg["beta_lo"] = rat_str(s.beta_lo);
        json rows = json::array();
        for (const auto& v : s.shape.len) rows.push_back(rat_str(v));
        seg["strip_rows"] = rows;
        j["segments"].push_back(seg);
      }
      j["at_initial"] = filling_to_json(trace.at_initial);
      j["at_zero"] = filling_to_json(trace.at_zero);
      std::cout << j.dump(2) << "\n";
    } else {
      for (const auto& b : trace.breakpoints)
        std::cout << "breakpoint beta=" << rat_str(b.beta) << " j=" << b.j << "\n";
      for (const auto& s : trace.segments) {
        std::cout << "segment (" << rat_str(s.beta_lo) << ", " << rat_str(s.beta_hi)
                  << "]: strip rows";
        for (const auto& v : s.shape.len) std::cout << " " << rat_str(v);
        std::cout << "\n";
      }
    }
    if (!sw_frames.empty()) {
      std::filesystem::create_directories(sw_frames);
      std::vector<Rat> betas;
      for (const auto& b : trace.breakpoints) betas.push_back(b.beta);
      betas.push_back(Rat(0));
      for (size_t k = 0; k < betas.size(); ++k) {
        // re-extract the filling at this parameter and render it
        std::vector<Rat> parts = trace.base_partition.parts;
        parts[sw_strip - 1] = betas[k];
        for (int i = sw_strip; i < static_cast<int>(parts.size()); ++i) parts[i] = 0;
        // endpoint-style filling via the trace's deform target
        std::vector<RPartition> seq;
        const int r = M.r();
        for (int m = 0; m <= r; ++m) {
          std::vector<Rat> pp(r, Rat(0));
          for (int i = 0; i < std::min(m, sw_strip); ++i) pp[i] = parts[i];
          if (m >= sw_strip) pp[sw_strip - 1] = betas[k];
          seq.push_back(invariant_partition(
              mat_mul(diag_from_partition(RPartition(pp)), trace.deform_target)));
        }
        const LRFilling frameF = filling_from_sequence(seq);
        DiagramSpec ds;
        ds.filling = frameF;
        std::ofstream out(sw_frames + "/frame-" + std::to_string(k) + "-beta-" +
                          rat_file_token(betas[k]) + ".svg");
        out << render_svg(ds);
      }
    }
    return 0;
  }

  if (cmd_count->parsed()) {
    const auto res = enumerate_integer_fillings(
        partition_parse(cnt_mu), partition_parse(cnt_nu), partition_parse(cnt_lambda));
    if (opt.format == "json")
      std::cout << json{{"count", res.count}}.dump() << "\n";
    else
      std::cout << res.count << "\n";
    return 0;
  }

  if (cmd_shift->parsed()) {
    const LRFilling F = filling_parse(slurp(sh_file));
    const LRFilling G = shift_filling(F, rat_parse(sh_alpha),
                                      sh_side == "left" ? Side::Left : Side::Right);
    emit_filling(G, opt);
    return 0;
  }

  if (cmd_check->parsed()) {
    if (chk_files.size() == 1) {
      const LRFilling F = filling_parse(slurp(chk_files[0]));
      const auto violations = validate_filling(F);
      if (opt.format == "json") {
        json arr = json::array();
        for (const auto& v : violations)
          arr.push_back({{"condition", v.condition}, {"i", v.i}, {"j", v.j},
                         {"detail", v.detail}});
        std::cout << json{{"valid", violations.empty()}, {"violations", arr}}.dump(2)
                  << "\n";
      } else {
        if (violations.empty()) {
          std::cout << "valid: nu=" << partition_line(F.nu())
                    << " lambda=" << partition_line(F.lambda()) << "\n";
        } else {
          for (const auto& v : violations)
            std::cout << "violation " << v.condition << " at (" << v.i << "," << v.j
                      << "): " << v.detail << "\n";
        }
      }
      return violations.empty() ? 0 : 2;
    }
    const ValMatrix M = matrix_parse(slurp(chk_files[0]));
    const ValMatrix N = matrix_parse(slurp(chk_files[1]));
    const GenericForm G = to_mu_nuhat_generic(M, N, opt.seed);
    if (opt.format == "json")
      std::cout << json{{"verified", G.verified},
                        {"mu", partition_to_json(G.mu)},
                        {"nu", partition_to_json(*G.nu)}}.dump(2)
                << "\n";
    else
      std::cout << "verified: mu=" << partition_line(G.mu)
                << " nu=" << partition_line(*G.nu) << "\n";
    return 0;
  }

  if (cmd_render->parsed()) {
    const LRFilling F = filling_parse(slurp(rn_file));
    DiagramSpec ds;
    ds.filling = F;
    std::cout << (rn_format == "svg" ? render_svg(ds) : render_ascii(ds));
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const lrval::GenericityError& ex) {
    std::cerr << "genericity failure: " << ex.what() << "\n";
    return 3;
  } catch (const lrval::ParseError& ex) {
    std::cerr << "parse error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
}
