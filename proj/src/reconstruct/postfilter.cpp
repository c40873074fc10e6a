#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bos/filters.hpp"
#include "bos/reconstruct.hpp"

namespace bos {

PostFilter PostFilter::parse(std::string_view text) {
  if (text == "median3") {
    return {Kind::median3, 1.0};
  }
  constexpr std::string_view kGauss = "gaussian";
  if (text.substr(0, kGauss.size()) == kGauss) {
    PostFilter f{Kind::gaussian, 1.0};
    if (text.size() > kGauss.size()) {
      if (text[kGauss.size()] != ':') {
        throw InvalidArgument("malformed postfilter '" + std::string(text) + "'");
      }
      const std::string number(text.substr(kGauss.size() + 1));
      try {
        f.sigma = std::stod(number);
      } catch (const std::exception&) {
        throw InvalidArgument("malformed gaussian sigma in '" + std::string(text) + "'");
      }
    }
    if (!(f.sigma > 0.0)) {
      throw InvalidArgument("gaussian postfilter sigma must be > 0");
    }
    return f;
  }
  throw InvalidArgument("unknown postfilter '" + std::string(text) +
                        "' (expected median3 or gaussian:<sigma>)");
}

namespace {

float median_of(std::vector<float>& values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const float upper = values[mid];
  if (values.size() % 2 == 1) {
    return upper;
  }
  const float lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5f * (lower + upper);
}

}  // namespace

DisplacementField postfilter(const DisplacementField& field, const PostFilter& filter) {
  field.validate();
  const int w = field.width();
  const int h = field.height();
  DisplacementField out = field;
  std::vector<std::uint8_t> valid_out(static_cast<std::size_t>(w) * h, 1);

  if (filter.kind == PostFilter::Kind::median3) {
    std::vector<float> us;
    std::vector<float> vs;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        us.clear();
        vs.clear();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int xx = x + dx;
            const int yy = y + dy;
            if (xx < 0 || yy < 0 || xx >= w || yy >= h || !field.is_valid(xx, yy)) continue;
            us.push_back(field.u(xx, yy));
            vs.push_back(field.v(xx, yy));
          }
        }
        if (us.empty()) {
          out.u(x, y) = 0.f;
          out.v(x, y) = 0.f;
          valid_out[static_cast<std::size_t>(y) * w + x] = 0;
          continue;
        }
        out.u(x, y) = median_of(us);
        out.v(x, y) = median_of(vs);
      }
    }
  } else {
    const std::vector<double> taps = gaussian_kernel(filter.sigma);
    const int r = static_cast<int>(taps.size() / 2);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double su = 0.0, sv = 0.0, sw = 0.0;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            const int xx = x + dx;
            const int yy = y + dy;
            if (xx < 0 || yy < 0 || xx >= w || yy >= h || !field.is_valid(xx, yy)) continue;
            const double wt = taps[dx + r] * taps[dy + r];
            su += wt * field.u(xx, yy);
            sv += wt * field.v(xx, yy);
            sw += wt;
          }
        }
        if (sw <= 0.0) {
          out.u(x, y) = 0.f;
          out.v(x, y) = 0.f;
          valid_out[static_cast<std::size_t>(y) * w + x] = 0;
          continue;
        }
        out.u(x, y) = static_cast<float>(su / sw);
        out.v(x, y) = static_cast<float>(sv / sw);
      }
    }
  }

  const bool all_valid = std::all_of(valid_out.begin(), valid_out.end(), [](auto b) { return b != 0; });
  out.valid = (field.valid.empty() && all_valid) ? std::vector<std::uint8_t>{} : valid_out;
  return out;
}

}  // namespace bos
