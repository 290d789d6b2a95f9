#include "nlsh/io.hpp"

#include <cstdint>
#include <fstream>

#include <json.hpp>

namespace nlsh {

namespace {
constexpr char kMagic[5] = {'N', 'L', 'S', 'H', '1'};
}

void write_field(const std::string& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_field: cannot open " + path);
  os.write(kMagic, 5);
  nlohmann::json header;
  header["d"] = f.grid.d;
  header["L"] = std::vector<double>(f.grid.d, f.grid.L);
  header["n"] = std::vector<int>(f.grid.d, f.grid.n);
  header["dtype"] = "c128";
  std::string hs = header.dump();
  std::uint32_t len = static_cast<std::uint32_t>(hs.size());
  os.write(reinterpret_cast<const char*>(&len), 4);
  os.write(hs.data(), hs.size());
  os.write(reinterpret_cast<const char*>(f.values.data()),
           static_cast<std::streamsize>(f.values.size() * sizeof(cplx)));
  if (!os) throw std::runtime_error("write_field: write failed for " + path);
}

Field read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_field: cannot open " + path);
  char magic[5];
  is.read(magic, 5);
  if (!is || std::string(magic, 5) != std::string(kMagic, 5))
    throw std::runtime_error("read_field: bad magic in " + path);
  std::uint32_t len = 0;
  is.read(reinterpret_cast<char*>(&len), 4);
  std::string hs(len, '\0');
  is.read(hs.data(), len);
  nlohmann::json header = nlohmann::json::parse(hs);
  int d = header.at("d").get<int>();
  auto Ls = header.at("L").get<std::vector<double>>();
  auto ns = header.at("n").get<std::vector<int>>();
  if (header.at("dtype").get<std::string>() != "c128")
    throw std::runtime_error("read_field: unsupported dtype");
  if (static_cast<int>(Ls.size()) != d || static_cast<int>(ns.size()) != d)
    throw std::runtime_error("read_field: header axis mismatch");
  for (int a = 1; a < d; ++a)
    if (Ls[a] != Ls[0] || ns[a] != ns[0])
      throw std::runtime_error("read_field: anisotropic grids not supported");
  Grid g(d, Ls[0], ns[0]);
  Field f(g);
  is.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(f.values.size() * sizeof(cplx)));
  if (!is) throw std::runtime_error("read_field: truncated data in " + path);
  return f;
}

}  // namespace nlsh
