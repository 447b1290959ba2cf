#include <cstring>

#include "doctest.h"
#include "support.hpp"
#include "vrkg/checkpoint.hpp"
#include "vrkg/error.hpp"

using namespace vrkg;
using testing::ScratchDir;

namespace {

Checkpoint sample_checkpoint() {
    Checkpoint c;
    c.params = init_params(3, 7, 4, 5, 2, 77);
    c.params.fusion_logits(0, 1) = -0.125;
    c.params.entity_emb(2, 3) = 1e-300;  // subnormal-adjacent values survive
    c.assignment = {0, 1, 1, 0};
    c.iterations = 3;
    c.layers = 2;
    return c;
}

void expect_data_error(const std::filesystem::path& p) {
    try {
        load_checkpoint(p);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Data);
    }
}

}  // namespace

TEST_CASE("checkpoint round trip is bit exact") {
    ScratchDir dir("ckpt");
    auto c = sample_checkpoint();
    save_checkpoint(dir / "c.bin", c);
    auto back = load_checkpoint(dir / "c.bin");
    CHECK(back.params == c.params);
    CHECK(back.assignment == c.assignment);
    CHECK(back.iterations == 3);
    CHECK(back.layers == 2);
    save_checkpoint(dir / "d.bin", back);
    CHECK(testing::read_text(dir / "c.bin") == testing::read_text(dir / "d.bin"));
    // header (8 + 8 + 56) + doubles + assignment
    CHECK(testing::read_text(dir / "c.bin").size() == 72 + 8 * ((3 + 7 + 4 + 2) * 5 + 2) + 4 * 4);
}

TEST_CASE("corrupted checkpoints are rejected") {
    ScratchDir dir("ckpt");
    save_checkpoint(dir / "c.bin", sample_checkpoint());
    const std::string good = testing::read_text(dir / "c.bin");

    std::string bad = good;
    bad[0] = 'X';
    testing::write_text(dir / "magic.bin", bad);
    expect_data_error(dir / "magic.bin");

    bad = good;
    bad[8] = 9;
    testing::write_text(dir / "version.bin", bad);
    expect_data_error(dir / "version.bin");

    testing::write_text(dir / "short.bin", good.substr(0, good.size() - 3));
    expect_data_error(dir / "short.bin");

    testing::write_text(dir / "long.bin", good + "xx");
    expect_data_error(dir / "long.bin");

    bad = good;
    std::int32_t out_of_range = 5;
    std::memcpy(bad.data() + bad.size() - 4, &out_of_range, 4);
    testing::write_text(dir / "assign.bin", bad);
    expect_data_error(dir / "assign.bin");

    bad = good;
    std::uint64_t huge = ~0ULL;
    std::memcpy(bad.data() + 16, &huge, 8);
    testing::write_text(dir / "huge.bin", bad);
    expect_data_error(dir / "huge.bin");

    testing::write_text(dir / "empty.bin", "");
    expect_data_error(dir / "empty.bin");
    expect_data_error(dir / "missing.bin");
}

TEST_CASE("matrix dumps round trip") {
    ScratchDir dir("ckpt");
    std::vector<Matrix> ms{Matrix(2, 3, 1.5), Matrix(0, 4), Matrix(1, 1, -2.0)};
    save_matrices(dir / "m.bin", ms);
    CHECK(load_matrices(dir / "m.bin") == ms);
    std::string bytes = testing::read_text(dir / "m.bin");
    testing::write_text(dir / "cut.bin", bytes.substr(0, bytes.size() - 1));
    CHECK_THROWS_AS(load_matrices(dir / "cut.bin"), Error);
}
