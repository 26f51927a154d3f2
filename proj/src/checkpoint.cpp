#include "sdax/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sdax {

using nlohmann::json;

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  json j;
  j["version"] = Checkpoint::kVersion;
  j["config"] = json::parse(config_to_json_text(ck.cfg));
  j["seed"] = ck.seed;
  j["iteration"] = ck.iteration;
  j["theta"] = ck.theta;
  j["psi_task"] = ck.psi_task;
  j["psi_div"] = ck.psi_div;
  j["phi"] = ck.phi;
  j["rnd_target"] = ck.rnd_target;
  j["rnd_predictor"] = ck.rnd_predictor;
  j["kappa"] = ck.kappa;
  j["lambda"] = {{"lambda", ck.lambda.lambda},
                 {"beta", ck.lambda.beta},
                 {"lambda_min", ck.lambda.lambda_min},
                 {"lambda_max", ck.lambda.lambda_max},
                 {"fixed", ck.lambda.fixed},
                 {"last_grad", ck.lambda.last_grad}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << j.dump();
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  json j = json::parse(ss.str());
  if (j.at("version").get<int>() != Checkpoint::kVersion)
    throw std::runtime_error("unsupported checkpoint version");
  Checkpoint ck;
  ck.cfg = config_from_json_text(j.at("config").dump());
  ck.seed = j.at("seed").get<std::uint64_t>();
  ck.iteration = j.at("iteration").get<int>();
  ck.theta = j.at("theta").get<Vec>();
  ck.psi_task = j.at("psi_task").get<Vec>();
  ck.psi_div = j.at("psi_div").get<Vec>();
  ck.phi = j.at("phi").get<Vec>();
  ck.rnd_target = j.at("rnd_target").get<Vec>();
  ck.rnd_predictor = j.at("rnd_predictor").get<Vec>();
  ck.kappa = j.at("kappa").get<double>();
  const auto& l = j.at("lambda");
  ck.lambda.lambda = l.at("lambda").get<double>();
  ck.lambda.beta = l.at("beta").get<double>();
  ck.lambda.lambda_min = l.at("lambda_min").get<double>();
  ck.lambda.lambda_max = l.at("lambda_max").get<double>();
  ck.lambda.fixed = l.at("fixed").get<bool>();
  ck.lambda.last_grad = l.at("last_grad").get<double>();
  return ck;
}

}  // namespace sdax
