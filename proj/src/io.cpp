#include "fraflow/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "field dumps assume a little-endian host");

namespace fraflow {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("io: cannot open '" + path + "' for writing");
    return out;
}

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

}  // namespace

void ensure_dir(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw std::runtime_error("io: cannot create directory '" + path + "': " + ec.message());
}

void write_trace_csv(const std::string& path, const FlowTrace& trace) {
    auto out = open_out(path);
    out << kTraceHeader << '\n';
    for (const DiagRecord& r : trace.records) {
        out << fmt(r.t) << ',' << fmt(r.mass) << ',' << fmt(r.entropy) << ','
            << fmt(r.fisher) << ',' << fmt(r.renyi) << ',' << fmt(r.boundary_frac)
            << ',' << fmt(r.min_u) << '\n';
    }
}

void write_history_csv(const std::string& path, const std::string& label,
                       const std::vector<double>& values) {
    auto out = open_out(path);
    out << "iter," << label << '\n';
    for (std::size_t i = 0; i < values.size(); ++i)
        out << i << ',' << fmt(values[i]) << '\n';
}

void dump_field(const std::string& dir, const std::string& name, const Field& f) {
    ensure_dir(dir);
    const std::string base = dir + "/" + name;
    {
        auto out = open_out(base + ".bin");
        out.write(reinterpret_cast<const char*>(f.v.data()),
                  static_cast<std::streamsize>(f.v.size() * sizeof(double)));
        if (!out) throw std::runtime_error("io: short write on '" + base + ".bin'");
    }
    nlohmann::json meta;
    meta["grid"] = {{"dim", f.grid.dim()},
                    {"n", f.grid.n()},
                    {"L", f.grid.half_width()}};
    meta["dtype"] = "float64";
    meta["byte_order"] = "little";
    meta["layout"] = "row-major";
    meta["count"] = f.v.size();
    write_text(base + ".meta.json", meta.dump(2) + "\n");
}

void write_text(const std::string& path, const std::string& content) {
    auto out = open_out(path);
    out << content;
}

std::string plot_script(const std::string& csv_name) {
    std::ostringstream os;
    os << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set xlabel 't'\n"
       << "set terminal pngcairo size 1200,800\n"
       << "set output 'diagnostics.png'\n"
       << "set multiplot layout 2,2\n"
       << "plot '" << csv_name << "' using 1:2 with lines title 'mass'\n"
       << "plot '" << csv_name << "' using 1:3 with lines title 'entropy'\n"
       << "plot '" << csv_name << "' using 1:4 with lines title 'fisher'\n"
       << "plot '" << csv_name << "' using 1:5 with lines title 'renyi'\n"
       << "unset multiplot\n";
    return os.str();
}

}  // namespace fraflow
