#include <spectrafw/instance_io.hpp>

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>

namespace spectrafw {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

void swap_if_big(char *p, std::size_t count) {
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < count; ++i)
            std::reverse(p + 8 * i, p + 8 * i + 8);
    } else {
        (void)p;
        (void)count;
    }
}

// Row-major dump of an rows x cols matrix.
void write_array(const fs::path &file, const Matrix &m) {
    std::vector<double> buf(static_cast<std::size_t>(m.size()));
    std::size_t k = 0;
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            buf[k++] = m(i, j);
    swap_if_big(reinterpret_cast<char *>(buf.data()), buf.size());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out)
        throw InputError("save_instance: cannot open " + file.string());
    out.write(reinterpret_cast<const char *>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(double)));
    if (!out)
        throw InputError("save_instance: write failed for " + file.string());
}

Matrix read_array(const fs::path &file, Index rows, Index cols) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw ParseError("load_instance: missing file " + file.filename().string());
    const std::size_t count = static_cast<std::size_t>(rows * cols);
    std::error_code ec;
    const auto bytes = fs::file_size(file, ec);
    if (ec || bytes != count * sizeof(double)) {
        std::ostringstream os;
        os << "load_instance: " << file.filename().string() << " has " << (ec ? 0 : bytes)
           << " bytes, expected " << count * sizeof(double);
        throw ParseError(os.str());
    }
    std::vector<double> buf(count);
    in.read(reinterpret_cast<char *>(buf.data()), static_cast<std::streamsize>(bytes));
    if (!in)
        throw ParseError("load_instance: short read on " + file.filename().string());
    swap_if_big(reinterpret_cast<char *>(buf.data()), count);
    Matrix m(rows, cols);
    std::size_t k = 0;
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            m(i, j) = buf[k++];
    if (!m.allFinite())
        throw ParseError("load_instance: non-finite values in " + file.filename().string());
    return m;
}

template <class T> T field(const json &j, const char *key) {
    if (!j.contains(key))
        throw ParseError(std::string("load_instance: manifest missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception &) {
        throw ParseError(std::string("load_instance: manifest field '") + key +
                         "' has the wrong type");
    }
}

} // namespace

void save_instance(const ProblemInstance &inst, const fs::path &dir) {
    const auto *map = dynamic_cast<const QuadraticSensingMap *>(&inst.map());
    const auto *loss = dynamic_cast<const LeastSquaresLoss *>(&inst.g());
    if (!map || !loss)
        throw InputError("save_instance: only quadratic-sensing least-squares instances can be saved");

    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw InputError("save_instance: cannot create directory " + dir.string());

    const Index n = inst.n(), m = inst.m();
    json files = json::array();
    write_array(dir / "a.f64", map->rows());
    files.push_back({{"name", "a.f64"}, {"shape", {m, n}}});
    write_array(dir / "y.f64", loss->target());
    files.push_back({{"name", "y.f64"}, {"shape", {m}}});
    if (!inst.c_is_zero()) {
        write_array(dir / "c_matrix.f64", inst.c());
        files.push_back({{"name", "c_matrix.f64"}, {"shape", {n, n}}});
    }
    Index r_nat = 0;
    double noise_c = 0;
    std::uint64_t seed = 0;
    if (inst.truth()) {
        const GroundTruth &t = *inst.truth();
        r_nat = t.u_nat.cols();
        noise_c = t.noise_c;
        seed = t.seed;
        write_array(dir / "u_nat.f64", t.u_nat);
        files.push_back({{"name", "u_nat.f64"}, {"shape", {n, r_nat}}});
    }

    json man = {{"format_version", kFormatVersion},
                {"n", n},
                {"m", m},
                {"r_nat", r_nat},
                {"tau", inst.tau()},
                {"noise_c", noise_c},
                {"seed", seed},
                {"has_ground_truth", inst.truth().has_value()},
                {"files", files}};
    std::ofstream out(dir / "manifest.json", std::ios::trunc);
    if (!out)
        throw InputError("save_instance: cannot write manifest in " + dir.string());
    out << man.dump(2) << "\n";
}

ProblemInstance load_instance(const fs::path &dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in)
        throw ParseError("load_instance: no manifest.json in " + dir.string());
    json man;
    try {
        man = json::parse(in);
    } catch (const json::parse_error &e) {
        throw ParseError(std::string("load_instance: manifest.json is not valid JSON: ") + e.what());
    }
    if (!man.is_object())
        throw ParseError("load_instance: manifest.json must be an object");

    const int version = field<int>(man, "format_version");
    if (version != kFormatVersion)
        throw ParseError("load_instance: unsupported format_version " + std::to_string(version));
    const Index n = field<Index>(man, "n");
    const Index m = field<Index>(man, "m");
    const Index r_nat = field<Index>(man, "r_nat");
    const double tau = field<double>(man, "tau");
    const double noise_c = field<double>(man, "noise_c");
    const auto seed = field<std::uint64_t>(man, "seed");
    const bool has_truth = field<bool>(man, "has_ground_truth");
    const json files = field<json>(man, "files");
    if (n < 1)
        throw ParseError("load_instance: field 'n' must be positive");
    if (m < 0)
        throw ParseError("load_instance: field 'm' must be nonnegative");
    if (!(tau > 0))
        throw ParseError("load_instance: field 'tau' must be positive");
    if (has_truth && (r_nat < 1 || r_nat > n))
        throw ParseError("load_instance: field 'r_nat' out of range");
    if (!files.is_array())
        throw ParseError("load_instance: field 'files' must be an array");

    // declared shapes must agree with n, m, r_nat
    bool has_c = false, has_u = false;
    for (const auto &f : files) {
        if (!f.is_object() || !f.contains("name") || !f.contains("shape"))
            throw ParseError("load_instance: malformed entry in field 'files'");
        std::string name;
        std::vector<Index> shape;
        try {
            name = f.at("name").get<std::string>();
            shape = f.at("shape").get<std::vector<Index>>();
        } catch (const json::exception &) {
            throw ParseError("load_instance: malformed entry in field 'files'");
        }
        std::vector<Index> want;
        if (name == "a.f64")
            want = {m, n};
        else if (name == "y.f64")
            want = {m};
        else if (name == "c_matrix.f64")
            want = {n, n}, has_c = true;
        else if (name == "u_nat.f64")
            want = {n, r_nat}, has_u = true;
        else
            throw ParseError("load_instance: unknown file '" + name + "' in field 'files'");
        if (shape != want)
            throw ParseError("load_instance: shape of '" + name + "' disagrees with n/m/r_nat");
    }
    if (has_u != has_truth)
        throw ParseError("load_instance: field 'has_ground_truth' disagrees with the file list");

    Matrix a = read_array(dir / "a.f64", m, n);
    Vector y = read_array(dir / "y.f64", m, 1);
    SymMatrix c;
    if (has_c) {
        c = read_array(dir / "c_matrix.f64", n, n);
        try {
            require_symmetric(c, "c_matrix.f64");
        } catch (const InputError &e) {
            throw ParseError(std::string("load_instance: ") + e.what());
        }
    }
    std::optional<GroundTruth> truth;
    if (has_truth)
        truth = GroundTruth{read_array(dir / "u_nat.f64", n, r_nat), noise_c, seed};

    return ProblemInstance(std::make_shared<LeastSquaresLoss>(std::move(y)),
                           std::make_shared<QuadraticSensingMap>(std::move(a)), std::move(c), tau,
                           std::move(truth));
}

} // namespace spectrafw
