#include "sprshift/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sprshift {

namespace {

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail_input("load", "cannot read " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail_input("load", path.string() + ": " + e.what());
    }
    return j;
}

std::vector<Vertex> parse_word(const std::string& key) {
    std::vector<Vertex> word;
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, ','))
        word.push_back(std::stoi(part));
    if (word.empty()) fail_input("potential", "empty word key");
    return word;
}

std::string word_key(const std::vector<Vertex>& word) {
    std::string key;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (i) key += ',';
        key += std::to_string(word[i]);
    }
    return key;
}

const char* tristate_name(Tristate t) {
    switch (t) {
    case Tristate::Yes: return "yes";
    case Tristate::No: return "no";
    default: return "unknown";
    }
}

} // namespace

GraphSource parse_graph_source(const json& j) {
    GraphSource src;
    if (j.contains("truncation")) src.truncation = j.at("truncation").get<int>();
    if (j.contains("bouquet")) {
        const json& b = j.at("bouquet");
        BouquetSpec spec;
        spec.base = b.value("base", 0);
        const std::string family = b.value("family", "table");
        if (family == "ceil_pow2_over_nsq") {
            spec.family = BouquetFamily::CeilPow2OverNsq;
            spec.M = b.value("M", 1);
            if (spec.M < 1) fail_input("parse_graph", "bouquet M must be >= 1");
        } else if (family == "ruette") {
            spec.family = BouquetFamily::Ruette;
        } else if (family == "table") {
            spec.family = BouquetFamily::Table;
            if (!b.contains("table")) fail_input("parse_graph", "table bouquet needs a table");
            for (const auto& [key, val] : b.at("table").items())
                spec.table.emplace_back(std::stoi(key), val.get<std::uint64_t>());
        } else {
            fail_input("parse_graph", "unknown bouquet family '" + family + "'");
        }
        src.bouquet = spec;
    }
    if (j.contains("edges")) {
        const json& edges = j.at("edges");
        int vertex_count = static_cast<int>(edges.size());
        if (j.contains("vertices")) {
            const json& verts = j.at("vertices");
            vertex_count = static_cast<int>(verts.size());
            for (int i = 0; i < vertex_count; ++i)
                if (verts.at(i).get<int>() != i)
                    fail_input("parse_graph", "vertex ids must be dense 0..V-1");
        }
        std::vector<std::pair<Vertex, Vertex>> edge_list;
        for (std::size_t u = 0; u < edges.size(); ++u)
            for (const auto& v : edges.at(u)) edge_list.emplace_back(Vertex(u), v.get<Vertex>());
        std::vector<std::string> labels;
        if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
        src.graph = DirectedGraph(vertex_count, std::move(edge_list), std::move(labels));
    }
    if (!src.graph && !src.bouquet)
        fail_input("parse_graph", "file names neither edges nor a bouquet rule");
    return src;
}

GraphSource load_graph_source(const std::filesystem::path& path) {
    return parse_graph_source(load_json(path));
}

DirectedGraph realize_graph(const GraphSource& source) {
    if (source.graph) return *source.graph;
    if (!source.truncation)
        fail_input("build_graph", "bouquet realization needs a truncation bound");
    return build_bouquet_graph(*source.bouquet, *source.truncation);
}

json serialize_graph(const DirectedGraph& g) {
    json j;
    std::vector<int> vertices(g.vertex_count());
    for (int i = 0; i < g.vertex_count(); ++i) vertices[i] = i;
    j["vertices"] = vertices;
    json edges = json::array();
    for (Vertex u = 0; u < g.vertex_count(); ++u) edges.push_back(g.successors(u));
    j["edges"] = edges;
    if (!g.labels().empty()) j["labels"] = g.labels();
    if (g.bouquet()) {
        json b;
        b["base"] = g.bouquet()->base;
        switch (g.bouquet()->family) {
        case BouquetFamily::CeilPow2OverNsq:
            b["family"] = "ceil_pow2_over_nsq";
            b["M"] = g.bouquet()->M;
            break;
        case BouquetFamily::Ruette:
            b["family"] = "ruette";
            break;
        case BouquetFamily::Table: {
            b["family"] = "table";
            json table;
            for (const auto& [n, count] : g.bouquet()->table)
                table[std::to_string(n)] = count;
            b["table"] = table;
            break;
        }
        }
        j["bouquet"] = b;
    }
    if (g.truncation()) j["truncation"] = *g.truncation();
    return j;
}

CylinderPotential parse_potential(const json& j) {
    const int range = j.at("range").get<int>();
    const int offset = j.value("offset", 0);
    std::map<std::vector<Vertex>, double> values;
    for (const auto& [key, val] : j.at("values").items())
        values[parse_word(key)] = val.get<double>();
    CylinderPotential p(range, std::move(values), offset);
    if (j.contains("beta")) p.holder_beta = j.at("beta").get<double>();
    if (j.contains("norm")) p.holder_norm = j.at("norm").get<double>();
    return p;
}

CylinderPotential load_potential(const std::filesystem::path& path) {
    return parse_potential(load_json(path));
}

json serialize_potential(const CylinderPotential& p) {
    json j;
    j["range"] = p.range();
    if (p.offset() != 0) j["offset"] = p.offset();
    json values;
    for (const auto& [word, val] : p.table()) values[word_key(word)] = val;
    j["values"] = values;
    if (p.holder_beta) j["beta"] = *p.holder_beta;
    if (p.holder_norm) j["norm"] = *p.holder_norm;
    return j;
}

std::vector<CocycleOrbit> parse_orbits(const json& j) {
    std::vector<CocycleOrbit> orbits;
    for (const json& o : j.at("orbits")) {
        CocycleOrbit orbit;
        orbit.weight = o.value("weight", 1.0);
        if (o.contains("values")) {
            orbit.values = o.at("values").get<std::vector<double>>();
        } else if (o.contains("matrices")) {
            for (const json& m : o.at("matrices")) {
                Eigen::Matrix2d A;
                A << m.at(0).at(0).get<double>(), m.at(0).at(1).get<double>(),
                    m.at(1).at(0).get<double>(), m.at(1).at(1).get<double>();
                orbit.steps.push_back(A);
            }
        } else {
            fail_input("parse_orbits", "orbit carries neither values nor matrices");
        }
        if (orbit.period_length() == 0) fail_input("parse_orbits", "empty orbit");
        orbits.push_back(std::move(orbit));
    }
    if (orbits.empty()) fail_input("parse_orbits", "no orbits in file");
    return orbits;
}

std::vector<CocycleOrbit> load_orbits(const std::filesystem::path& path) {
    return parse_orbits(load_json(path));
}

json serialize_verdict(const SprVerdict& v) {
    json j;
    switch (v.verdict) {
    case Verdict::Spr: j["verdict"] = "SPR"; break;
    case Verdict::PositiveRecurrentNotSpr: j["verdict"] = "PositiveRecurrentNotSPR"; break;
    case Verdict::Inconclusive: j["verdict"] = "Inconclusive"; break;
    }
    j["spr"] = tristate_name(v.spr);
    j["positive_recurrence"] = tristate_name(v.pr);
    json evidence = json::array();
    for (const auto& e : v.evidence) {
        json item;
        item["name"] = e.name;
        item["value"] = e.value;
        item["rigorous"] = e.rigorous;
        if (!e.detail.empty()) item["detail"] = e.detail;
        evidence.push_back(item);
    }
    j["evidence"] = evidence;
    return j;
}

json serialize_measure(const MarkovMeasure& m) {
    json j;
    j["entropy"] = m.entropy;
    j["lambda"] = m.lambda;
    std::vector<double> p(m.initial.data(), m.initial.data() + m.initial.size());
    j["p_v"] = p;
    json rows = json::array();
    for (int u = 0; u < m.transition.rows(); ++u) {
        std::vector<double> row(m.transition.cols());
        for (int v = 0; v < m.transition.cols(); ++v) row[v] = m.transition(u, v);
        rows.push_back(row);
    }
    j["p_uv"] = rows;
    return j;
}

json serialize_census(const LoopCensus& c) {
    json j;
    j["base"] = c.base;
    j["horizon"] = c.horizon;
    j["exact"] = c.exact;
    std::vector<std::string> z, zs;
    for (const auto& v : c.Z) z.push_back(v.str());
    for (const auto& v : c.Zstar) zs.push_back(v.str());
    j["Z"] = z;
    j["Zstar"] = zs;
    if (c.finite_support_certified) j["support_bound"] = c.support_bound;
    return j;
}

json serialize_report(const StatReport& r) {
    json j;
    j["name"] = r.name;
    j["estimate"] = r.estimate;
    j["reference"] = r.reference;
    if (!r.reference_provenance.empty()) j["reference_provenance"] = r.reference_provenance;
    j["tolerance"] = r.tolerance;
    if (r.standard_error) j["standard_error"] = *r.standard_error;
    j["pass"] = r.pass;
    j["n"] = r.n;
    j["replicas"] = r.replicas;
    j["seed"] = r.seed;
    if (!r.notes.empty()) j["notes"] = r.notes;
    return j;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& contents) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail_input("write", "cannot open " + tmp.string());
        out << contents;
        if (!out.good()) fail_input("write", "short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) fail_input("write", "rename failed: " + ec.message());
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += header[i];
    }
    out += '\n';
    const std::size_t rows = columns.empty() ? 0 : columns[0].size();
    for (const auto& col : columns)
        if (col.size() != rows) fail_input("csv", "ragged columns");
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) out += ',';
            out += format_double(columns[c][r]);
        }
        out += '\n';
    }
    return out;
}

std::string graph_hash(const DirectedGraph& g) {
    const std::string canon = serialize_graph(g).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace sprshift
