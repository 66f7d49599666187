#include "elab/family_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace elab {

namespace {

constexpr double kThetaClamp = 1e-4;

double clamp_theta(double th, int index, std::vector<std::string>& warnings) {
  if (th < kThetaClamp || th > 1.0 - kThetaClamp) {
    const double clamped = std::min(std::max(th, kThetaClamp), 1.0 - kThetaClamp);
    std::ostringstream os;
    os << "theta[" << index << "] = " << th << " clamped to " << clamped;
    warnings.push_back(os.str());
    return clamped;
  }
  return th;
}

Eigen::VectorXd parse_px(const nlohmann::json& j) {
  if (!j.contains("px") || !j["px"].is_array())
    throw std::invalid_argument("family: missing or non-array field 'px'");
  const auto& arr = j["px"];
  Eigen::VectorXd px(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) px[static_cast<int>(i)] = arr[i].get<double>();
  if (!is_distribution(px, 1e-9))
    throw std::invalid_argument("family: 'px' is not a probability distribution");
  return px;
}

}  // namespace

LoadedFamily parse_family_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("family: JSON parse error: ") + e.what());
  }
  if (!j.contains("type") || !j["type"].is_string())
    throw std::invalid_argument("family: missing field 'type'");
  const std::string type = j["type"].get<std::string>();
  LoadedFamily out;

  if (type == "bsc_grid") {
    if (!j.contains("thetas") || !j["thetas"].is_array() || j["thetas"].empty())
      throw std::invalid_argument("family: 'bsc_grid' needs a nonempty array 'thetas'");
    std::vector<double> thetas;
    int idx = 0;
    for (const auto& v : j["thetas"]) {
      double th = v.get<double>();
      if (th < 0.0 || th > 1.0)
        throw std::invalid_argument("family: thetas[" + std::to_string(idx) +
                                    "] outside [0,1]");
      thetas.push_back(clamp_theta(th, idx, out.warnings));
      ++idx;
    }
    out.family = ChannelFamily::bsc_family(std::move(thetas), parse_px(j));
    return out;
  }

  if (type == "dmc_set") {
    if (!j.contains("channels") || !j["channels"].is_array() || j["channels"].empty())
      throw std::invalid_argument("family: 'dmc_set' needs a nonempty array 'channels'");
    std::vector<Dmc> channels;
    int ci = 0;
    for (const auto& cj : j["channels"]) {
      if (!cj.is_array() || cj.empty())
        throw std::invalid_argument("family: channels[" + std::to_string(ci) +
                                    "] must be a matrix");
      const int nx = static_cast<int>(cj.size());
      const int ny = static_cast<int>(cj[0].size());
      Eigen::MatrixXd w(nx, ny);
      for (int x = 0; x < nx; ++x) {
        if (static_cast<int>(cj[x].size()) != ny)
          throw std::invalid_argument("family: channels[" + std::to_string(ci) + "] row " +
                                      std::to_string(x) + " has inconsistent width");
        double row_sum = 0.0;
        for (int y = 0; y < ny; ++y) {
          w(x, y) = cj[x][y].get<double>();
          if (w(x, y) < 0.0)
            throw std::invalid_argument("family: channels[" + std::to_string(ci) + "] row " +
                                        std::to_string(x) + " has a negative entry");
          row_sum += w(x, y);
        }
        if (std::abs(row_sum - 1.0) > 1e-9)
          throw std::invalid_argument("family: channels[" + std::to_string(ci) + "] row " +
                                      std::to_string(x) + " is not stochastic (sums to " +
                                      std::to_string(row_sum) + ")");
        w.row(x) /= row_sum;  // absorb benign decimal rounding
      }
      channels.emplace_back(w);
      ++ci;
    }
    out.family = ChannelFamily::dmc_family(std::move(channels), parse_px(j));
    return out;
  }

  throw std::invalid_argument("family: unknown type '" + type + "'");
}

LoadedFamily load_family(const std::string& path_or_spec) {
  if (path_or_spec.rfind("bsc:", 0) == 0) {
    LoadedFamily out;
    std::vector<double> thetas;
    std::stringstream ss(path_or_spec.substr(4));
    std::string tok;
    int idx = 0;
    while (std::getline(ss, tok, ',')) {
      const double th = std::stod(tok);
      if (th < 0.0 || th > 1.0)
        throw std::invalid_argument("family: inline theta outside [0,1]: " + tok);
      thetas.push_back(clamp_theta(th, idx++, out.warnings));
    }
    if (thetas.empty()) throw std::invalid_argument("family: empty inline bsc spec");
    out.family = ChannelFamily::bsc_family(std::move(thetas), Eigen::Vector2d(0.5, 0.5));
    return out;
  }
  std::ifstream in(path_or_spec);
  if (!in) throw std::invalid_argument("family: cannot open file " + path_or_spec);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_family_json(buf.str());
}

std::string family_to_json(const ChannelFamily& family) {
  nlohmann::json j;
  j["px"] = std::vector<double>(family.px.data(), family.px.data() + family.px.size());
  if (family.kind == ChannelFamily::Kind::bsc_grid) {
    j["type"] = "bsc_grid";
    j["thetas"] = family.thetas;
  } else {
    j["type"] = "dmc_set";
    nlohmann::json chans = nlohmann::json::array();
    for (const Dmc& w : family.channels) {
      nlohmann::json m = nlohmann::json::array();
      for (int x = 0; x < w.nx(); ++x) {
        nlohmann::json row = nlohmann::json::array();
        for (int y = 0; y < w.ny(); ++y) row.push_back(w.w(x, y));
        m.push_back(row);
      }
      chans.push_back(m);
    }
    j["channels"] = chans;
  }
  return j.dump();
}

}  // namespace elab
