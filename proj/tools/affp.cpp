// affp: command-line front end.
//
//   affp param     in.json [--mode principal|consistent] [--consistent-with ref.json] [-o out.json]
//   affp unparam   in.json [-o out.json]
//   affp blend     in.json --weights 0.5,0.5 [--mode ...] [-o out.json]
//   affp interp    track.json --samples N [--curve linear|hermite|bspline] [--mode ...] [-o out.json]
//   affp meshblend rest.obj target.obj... --weights ... [--mode ...] [-o out.obj]
//   affp bench     [--n N] [--det-floor F] [--seed S] [-o out.csv]
//
// Exit codes: 0 ok, 1 usage or malformed input, 2 domain error, 3 solver failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "affp/bench.hpp"
#include "affp/blend.hpp"
#include "affp/error.hpp"
#include "affp/meshblend.hpp"
#include "affp/obj_io.hpp"
#include "affp/transform_file.hpp"

namespace {

using namespace affp;

// Writes to the -o path, or stdout when it is empty.
template <class F>
void with_output(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  write(out);
}

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::ParseError:
    case ErrorCode::InvalidArgument: return 1;
    case ErrorCode::SolverNotConverged: return 3;
    default: return 2;
  }
}

std::vector<AffineParam12> to_params(const TransformFile& f, BranchMode mode, const TransformFile* refs) {
  if (refs && refs->transforms.size() != 1 && refs->transforms.size() != f.transforms.size())
    throw Error(ErrorCode::InvalidArgument, "--consistent-with needs 1 or " + std::to_string(f.transforms.size()) +
                                                " transforms, got " + std::to_string(refs->transforms.size()));
  std::vector<AffineParam12> out;
  AffineParam12 prev;
  for (std::size_t i = 0; i < f.transforms.size(); ++i) {
    try {
      if (refs) {
        const AffineParam12 ref = as_param(refs->transforms[refs->transforms.size() == 1 ? 0 : i]);
        out.push_back(as_param(f.transforms[i], &ref));
      } else if (mode == BranchMode::Consistent) {
        out.push_back(as_param(f.transforms[i], &prev));
      } else {
        out.push_back(as_param(f.transforms[i]));
      }
    } catch (const Error& e) {
      throw Error(e.code(), "transforms[" + std::to_string(i) + "]: " + e.message());
    }
    prev = out.back();
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blend, interpolate and parametrise 3D affine transformations"};
  app.require_subcommand(1);

  const std::map<std::string, BranchMode> modes{{"principal", BranchMode::Principal},
                                                {"consistent", BranchMode::Consistent}};
  const std::map<std::string, Curve> curves{
      {"linear", Curve::Linear}, {"hermite", Curve::Hermite}, {"bspline", Curve::BSpline}};

  std::string input, output, refs_path;
  BranchMode mode = BranchMode::Principal;
  Curve curve = Curve::Linear;
  std::vector<double> weights;
  int samples = 10;
  std::vector<std::string> meshes;
  std::size_t n = 100000;
  double det_floor = 1e-3;
  std::uint64_t seed = 1;

  auto add_mode = [&](CLI::App* sub) {
    sub->add_option("--mode", mode, "rotation log branch")->transform(CLI::CheckedTransformer(modes));
  };

  auto* param = app.add_subcommand("param", "matrix form -> parameter form");
  param->add_option("input", input, "transform file")->required();
  param->add_option("--consistent-with", refs_path, "reference parameters for the rotation branch");
  add_mode(param);
  param->add_option("-o,--output", output);

  auto* unparam = app.add_subcommand("unparam", "parameter form -> matrix form");
  unparam->add_option("input", input, "transform file")->required();
  unparam->add_option("-o,--output", output);

  auto* blend_cmd = app.add_subcommand("blend", "weighted sum in parameter space");
  blend_cmd->add_option("input", input, "transform file")->required();
  blend_cmd->add_option("--weights", weights)->required()->delimiter(',');
  add_mode(blend_cmd);
  blend_cmd->add_option("-o,--output", output);

  auto* interp = app.add_subcommand("interp", "sample a keyframed pose track");
  interp->add_option("input", input, "track file (transforms + times)")->required();
  interp->add_option("--samples", samples)->check(CLI::PositiveNumber);
  interp->add_option("--curve", curve)->transform(CLI::CheckedTransformer(curves));
  add_mode(interp);
  interp->add_option("-o,--output", output);

  auto* mesh = app.add_subcommand("meshblend", "blend compatible triangle meshes");
  mesh->add_option("meshes", meshes, "rest OBJ followed by target OBJs")->required()->expected(2, -1);
  mesh->add_option("--weights", weights)->required()->delimiter(',');
  add_mode(mesh);
  mesh->add_option("-o,--output", output);

  auto* bench_cmd = app.add_subcommand("bench", "error and timing report as CSV");
  bench_cmd->add_option("--n", n)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--det-floor", det_floor)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", seed);
  bench_cmd->add_option("-o,--output", output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*param) {
      const TransformFile f = read_transform_file(input);
      std::optional<TransformFile> refs;
      if (!refs_path.empty()) refs = read_transform_file(refs_path);
      const auto ps = to_params(f, mode, refs ? &*refs : nullptr);
      with_output(output, [&](std::ostream& o) { write_params(o, ps); });
    } else if (*unparam) {
      const TransformFile f = read_transform_file(input);
      std::vector<HomAffine3> ms;
      for (const auto& e : f.transforms) ms.push_back(as_matrix(e));
      with_output(output, [&](std::ostream& o) { write_matrices(o, ms); });
    } else if (*blend_cmd) {
      const TransformFile f = read_transform_file(input);
      if (weights.size() != f.transforms.size())
        throw Error(ErrorCode::InvalidArgument, std::to_string(f.transforms.size()) + " transforms but " +
                                                    std::to_string(weights.size()) + " weights");
      const auto ps = to_params(f, mode, nullptr);
      AffineParam12 acc;
      for (std::size_t i = 0; i < ps.size(); ++i) acc += weights[i] * ps[i];
      with_output(output, [&](std::ostream& o) { write_matrices(o, {phi(acc)}); });
    } else if (*interp) {
      const TransformFile f = read_transform_file(input);
      PoseTrack track;
      track.knots = to_params(f, mode, nullptr);
      track.times = f.times;
      std::vector<double> ts;
      std::vector<HomAffine3> out;
      if (f.times.size() != f.transforms.size())
        throw Error(ErrorCode::InvalidArgument, "track needs one time per transform");
      for (int k = 0; k < samples; ++k) {
        const double s = samples == 1 ? 0.0 : static_cast<double>(k) / (samples - 1);
        const double t = k + 1 == samples && samples > 1 ? f.times.back()
                                                         : f.times.front() + s * (f.times.back() - f.times.front());
        ts.push_back(t);
        out.push_back(interpolate_pose(track, t, curve));
      }
      with_output(output, [&](std::ostream& o) { write_matrices(o, out, ts); });
    } else if (*mesh) {
      CompatibleSet set;
      set.rest = read_obj_file(meshes.front());
      for (std::size_t i = 1; i < meshes.size(); ++i) set.targets.push_back(read_obj_file(meshes[i]));
      MeshBlendOptions opt;
      opt.mode = mode;
      const MeshBlendResult r = blend_shapes(set, weights, opt);
      with_output(output, [&](std::ostream& o) { write_obj(o, r.mesh); });
    } else if (*bench_cmd) {
      const bench::BenchReport rep = bench::run_all(n, det_floor, seed);
      with_output(output, [&](std::ostream& o) { bench::write_csv(o, rep); });
    }
  } catch (const Error& e) {
    std::cerr << "affp: " << e.what() << '\n';
    return exit_code(e.code());
  }
  return 0;
}
