#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "uep/alist.hpp"

using namespace uep::code;

namespace {

SparseMatrix small() {
  SparseMatrix h(5, 3);
  h.add_edge(0, 0);
  h.add_edge(0, 3);
  h.add_edge(1, 0);
  h.add_edge(1, 1);
  h.add_edge(1, 3);
  h.add_edge(1, 4);
  h.add_edge(2, 2);
  h.add_edge(2, 4);
  h.class_of_column = {0, 0, 1, 2, 2};
  h.seed = 42;
  return h;
}

}  // namespace

TEST_CASE("alist text layout") {
  std::ostringstream os;
  write_alist(os, small());
  const std::string expect =
      "5 3\n"
      "2 4\n"
      "2 1 1 2 2\n"
      "2 4 2\n"
      "1 2\n2 0\n3 0\n1 2\n2 3\n"
      "1 4 0 0\n1 2 4 5\n3 5 0 0\n";
  CHECK(os.str() == expect);
}

TEST_CASE("alist round trip, padded and unpadded") {
  const auto h = small();
  std::ostringstream os;
  write_alist(os, h);
  std::istringstream is(os.str());
  auto back = read_alist(is);
  back.class_of_column = h.class_of_column;
  back.seed = h.seed;
  CHECK(back == h);

  const std::string unpadded = "5 3\n2 4\n2 1 1 2 2\n2 4 2\n1 2\n2\n3\n1 2\n2 3\n1 4\n1 2 4 5\n3 5\n";
  std::istringstream is2(unpadded);
  auto back2 = read_alist(is2);
  back2.class_of_column = h.class_of_column;
  back2.seed = h.seed;
  CHECK(back2 == h);
}

TEST_CASE("inconsistent alist is rejected") {
  std::istringstream is("2 1\n1 2\n1 1\n2\n1\n1\n1 0\n");
  CHECK_THROWS(read_alist(is));
}

TEST_CASE("matrix with sidecar round trips through files") {
  const auto dir = std::filesystem::temp_directory_path() / "uep_alist_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "m.alist").string();
  const auto h = small();
  auto meta = meta_of(h, 2, {"hello"});
  meta.row_quotas = {{1, 0, 1}, {2, 0, 2}, {0, 1, 1}};
  save_code(path, h, meta);
  CodeMeta got;
  const auto back = load_code(path, &got);
  CHECK(back == h);
  CHECK(got.parity_class == 2);
  CHECK(got.row_quotas == meta.row_quotas);
  CHECK(got.notes == std::vector<std::string>{"hello"});
  std::filesystem::remove_all(dir);
}
