#include <doctest.h>

#include <fstream>

#include "dentseg/io.hpp"
#include "support.hpp"

using namespace dentseg;

namespace {
void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}
}  // namespace

TEST_SUITE("io") {
  TEST_CASE("quantize clamps and rounds half up") {
    CHECK(quantize(254.6) == 255);
    CHECK(quantize(-3.0) == 0);
    CHECK(quantize(300.0) == 255);
    CHECK(quantize(10.5) == 11);
    CHECK(quantize(10.49) == 10);
  }

  TEST_CASE("PGM and PNG round trips") {
    const auto dir = testing::scratch_dir("io");
    testing::Gen gen(3);
    const GrayImage img = gen.byte_image(17, 9);
    for (const char* name : {"a.pgm", "a.png"}) {
      save_image(img, dir / name);
      CHECK(load_image(dir / name) == img);
    }
    save_image(GrayImage(4, 4), dir / "zero.pgm");
    CHECK(load_image(dir / "zero.pgm") == GrayImage(4, 4));

    GrayImage odd(2, 1, std::vector<double>{254.6, 0.2});
    save_image(odd, dir / "q.pgm");
    const GrayImage back = load_image(dir / "q.pgm");
    CHECK(back.at(0, 0) == 255.0);
    CHECK(back.at(1, 0) == 0.0);
  }

  TEST_CASE("PGM header comments and maxval scaling") {
    const auto dir = testing::scratch_dir("io_pgm");
    write_bytes(dir / "c.pgm", std::string("P5\n# comment\n2 1\n# another\n255\n") + '\x05' + '\xff');
    const GrayImage a = load_image(dir / "c.pgm");
    CHECK(a.at(0, 0) == 5.0);
    CHECK(a.at(1, 0) == 255.0);
    write_bytes(dir / "m.pgm", std::string("P5 2 1 15\n") + '\x0f' + '\x00');
    const GrayImage b = load_image(dir / "m.pgm");
    CHECK(b.at(0, 0) == 255.0);
    CHECK(b.at(1, 0) == 0.0);
  }

  TEST_CASE("malformed inputs are rejected") {
    const auto dir = testing::scratch_dir("io_bad");
    write_bytes(dir / "short.pgm", std::string("P5\n4 4\n255\n") + "abc");
    write_bytes(dir / "text.pgm", "P2\n1 1\n255\n7\n");
    write_bytes(dir / "junk.png", "\x89PNG\r\n\x1a\n garbage");
    write_bytes(dir / "none.dat", "hello");
    for (const char* name : {"short.pgm", "text.pgm", "junk.png", "none.dat", "missing.pgm"}) {
      CHECK_THROWS_AS(load_image(dir / name), ImageIoError);
    }
    CHECK_THROWS_AS(save_image(GrayImage(2, 2), dir / "x.bmp"), ImageIoError);
    CHECK_THROWS_AS(save_image(GrayImage(2, 2), dir / "no_such_dir" / "x.pgm"), ImageIoError);
  }

  TEST_CASE("RGB overlay PNG reads back as luminance") {
    const auto dir = testing::scratch_dir("io_rgb");
    RgbImage rgb{2, 1, {0, 0, 255, 100, 100, 100}};
    save_rgb_png(rgb, dir / "o.png");
    const GrayImage g = load_image(dir / "o.png");
    CHECK(g.width() == 2);
    CHECK(g.at(1, 0) == doctest::Approx(100.0).epsilon(0.01));
    CHECK(g.at(0, 0) == doctest::Approx(0.114 * 255.0).epsilon(0.02));
  }
}
