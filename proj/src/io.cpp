#include "torsionlab/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace torsionlab {

namespace fs = std::filesystem;

void atomic_write(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("atomic_write: cannot open " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("atomic_write: short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

void write_field_csv(const fs::path& path, const ScalarField& field) {
    const Grid& g = field.grid;
    std::ostringstream out;
    out << "x,y,value,is_interior\n";
    char buf[128];
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            int id = g.id(i, j);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", g.x(i), g.y(j),
                          field.values[static_cast<size_t>(id)],
                          int(g.interior[static_cast<size_t>(id)]));
            out << buf;
        }
    atomic_write(path, out.str());
}

void write_field_binary(const fs::path& path, const ScalarField& field) {
    const Grid& g = field.grid;
    std::string blob;
    uint64_t dims[2] = {static_cast<uint64_t>(g.nx), static_cast<uint64_t>(g.ny)};
    blob.append(reinterpret_cast<const char*>(dims), sizeof dims);
    blob.append(reinterpret_cast<const char*>(field.values.data()),
                field.values.size() * sizeof(double));
    atomic_write(path, blob);
}

void write_dat(const fs::path& path, const std::vector<double>& x, const std::vector<double>& y,
               const std::string& header) {
    std::ostringstream out;
    if (!header.empty()) out << "# " << header << "\n";
    char buf[80];
    for (size_t i = 0; i < x.size() && i < y.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g %.12g\n", x[i], y[i]);
        out << buf;
    }
    atomic_write(path, out.str());
}

}  // namespace torsionlab
