#include <doctest.h>

#include <cmath>
#include <string>

#include "gks/error.hpp"
#include "gks/svg.hpp"

using namespace gks;

namespace {

bool contains(const std::string& s, const std::string& what) { return s.find(what) != std::string::npos; }

}  // namespace

TEST_CASE("each plot kind renders a standalone svg") {
  const std::vector<double> a{1.0, 2.0, 3.0}, b{0.5, 0.25, 0.125};
  const std::vector<Dataset> data{
      {"s", {{"re_lambda", {-1.0, -0.5, 0.0}}, {"im_lambda", {0.3, -0.2, 0.0}}}, {}},
      {"o", {{"u", a}, {"ux", b}, {"uxx", a}}, {}},
      {"b", {{"omega", a}, {"max_re", {-1e-3, 0.0, 1e-2}}, {"stable", {0.0, 1.0, 0.0}}}, {}},
      {"h", {{"x", {0.0, 1.0}}, {"t", {0.0, 1.0, 2.0}}, {"value", {1, 2, 3, 4, 5, 6}}}, {}},
      {"d", {{"t", a}, {"residual_Linf", b}, {"residual_L2", b}}, {}},
  };
  const std::vector<PlotKind> kinds{PlotKind::Spectrum, PlotKind::Orbit, PlotKind::Band, PlotKind::Heatmap,
                                    PlotKind::Decay};
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const std::string svg = emit_svg(data[i], kinds[i]);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(contains(svg, "</svg>"));
    CHECK_FALSE(contains(svg, "nan"));
  }
}

TEST_CASE("schema errors name the column") {
  Dataset d{"s", {{"re_lambda", {1.0}}}, {}};
  try {
    emit_svg(d, PlotKind::Spectrum);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PlotSchema);
    CHECK(contains(e.what(), "im_lambda"));
  }
  Dataset h{"h", {{"x", {0.0, 1.0}}, {"t", {0.0}}, {"value", {1.0}}}, {}};
  CHECK_THROWS_AS(emit_svg(h, PlotKind::Heatmap), Error);
  Dataset len{"d", {{"t", {1.0, 2.0}}, {"residual_Linf", {1.0}}, {"residual_L2", {1.0, 2.0}}}, {}};
  CHECK_THROWS_AS(emit_svg(len, PlotKind::Decay), Error);
}

TEST_CASE("empty data is annotated") {
  Dataset d{"s", {{"re_lambda", {}}, {"im_lambda", {}}}, {}};
  CHECK(contains(emit_svg(d, PlotKind::Spectrum), "no data"));
}

TEST_CASE("non-finite samples are skipped") {
  Dataset d{"s", {{"re_lambda", {-1.0, NAN, 0.0}}, {"im_lambda", {0.0, 1.0, INFINITY}}}, {}};
  const std::string svg = emit_svg(d, PlotKind::Spectrum);
  CHECK_FALSE(contains(svg, "nan"));
  CHECK_FALSE(contains(svg, "inf\""));
}

TEST_CASE("composition keeps every panel") {
  Dataset d{"o", {{"u", {0.0, 1.0}}, {"ux", {1.0, 0.0}}, {"uxx", {0.0, 0.0}}}, {}};
  const std::string one = emit_svg(d, PlotKind::Orbit);
  const std::string both = compose_svg({one, one, one}, 2, "grid");
  std::size_t count = 0;
  for (std::size_t p = both.find("<svg"); p != std::string::npos; p = both.find("<svg", p + 1)) ++count;
  CHECK(count == 4);
  CHECK(contains(both, "grid"));
}
