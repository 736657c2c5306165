#include "drmine/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "drmine/cluster.hpp"
#include "drmine/csv.hpp"
#include "drmine/digest.hpp"
#include "drmine/embed.hpp"
#include "drmine/error.hpp"
#include "drmine/fixture.hpp"
#include "drmine/ingest.hpp"
#include "drmine/random.hpp"
#include "drmine/report.hpp"
#include "drmine/resources.hpp"
#include "drmine/svg.hpp"
#include "drmine/textprep.hpp"
#include "drmine/topicmodel.hpp"

namespace drmine::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
    std::uint64_t seed = 42;
    std::size_t topics = 10;
    std::size_t k_min = 2;
    std::size_t k_max = 10;
    std::string stopwords;
    std::string rules;
    std::string drill_rules;
    std::string out = "out";
    std::string format = "csv";
    bool strict = false;
    bool quiet = false;

    double alpha = 0.0;
    double beta = 0.01;
    std::size_t lda_iterations = 1000;
    std::size_t min_doc_count = 1;
    double max_doc_fraction = 0.5;
    std::size_t restarts = 10;
    std::size_t kmeans_iterations = 300;
    double perplexity = 30.0;
    double learning_rate = 200.0;
    std::size_t tsne_iterations = 1000;
    std::size_t top_words = 30;
    std::size_t keywords = 10;
    bool weighted = false;

    std::vector<std::string> inputs;
    std::optional<std::size_t> k;
    std::optional<std::size_t> drill_cluster;
    bool recluster = false;
    bool dump_tokens = false;
    bool dump_vocab = false;
};

// Shared state of one invocation.
struct Context {
    Options opt;
    fs::path out_dir;
    std::ostream& out;
    std::ostream& err;
    bool color = false;
    std::vector<std::string> written;
    double used_perplexity = 0.0;  // after any reduction in the embed stage

    void info(const std::string& message) const {
        if (!opt.quiet) err << message << '\n';
    }
    void warn(const std::string& message) const {
        err << (color ? "\033[33mwarning:\033[0m " : "warning: ") << message << '\n';
    }

    std::uint64_t stage_seed(std::string_view stage) const { return derive_seed(opt.seed, stage); }

    void write(const std::string& name, const std::string& contents) {
        fs::create_directories(out_dir);
        const auto path = out_dir / name;
        std::ofstream file(path, std::ios::binary);
        file << contents;
        if (!file) throw DataError("cannot write '" + path.string() + "'");
        if (std::find(written.begin(), written.end(), name) == written.end()) written.push_back(name);
    }

    std::string read(const std::string& name, const char* producer) const {
        const auto path = out_dir / name;
        std::ifstream file(path, std::ios::binary);
        if (!file) {
            throw DataError("missing artifact '" + path.string() + "'; run the '" + producer + "' stage first");
        }
        std::ostringstream buffer;
        buffer << file.rdbuf();
        return buffer.str();
    }

    json read_json(const std::string& name, const char* producer) const {
        try {
            return json::parse(read(name, producer));
        } catch (const json::exception& e) {
            throw DataError("artifact '" + name + "' is not valid JSON: " + e.what());
        }
    }
};

// A table emitted as CSV, and additionally as JSON with --format json.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<json>> rows;
};

std::string cell_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return csv::format_double(v.get<double>());
    if (v.is_array()) {
        std::string joined;
        for (const auto& item : v) {
            if (!joined.empty()) joined += ", ";
            joined += cell_text(item);
        }
        return joined;
    }
    return v.dump();
}

void write_table(Context& ctx, const std::string& stem, const Table& table) {
    std::vector<csv::Row> rows{table.header};
    auto objects = json::array();
    for (const auto& row : table.rows) {
        csv::Row text;
        json object = json::object();
        for (std::size_t c = 0; c < row.size(); ++c) {
            text.push_back(cell_text(row[c]));
            object[table.header[c]] = row[c];
        }
        rows.push_back(std::move(text));
        objects.push_back(std::move(object));
    }
    ctx.write(stem + ".csv", csv::to_string(rows));
    if (ctx.opt.format == "json") ctx.write(stem + ".json", objects.dump(2) + "\n");
}

// ---------------------------------------------------------------- loading

std::vector<ingest::ReportRecord> load_inputs(const Context& ctx, const std::vector<std::string>& files) {
    constexpr std::size_t kMaxListed = 20;
    std::vector<std::vector<ingest::ReportRecord>> batches;
    for (const auto& file : files) {
        auto loaded = ingest::load_reports(file, ctx.opt.strict ? ingest::SchemaMode::Strict
                                                                : ingest::SchemaMode::Lenient);
        std::size_t listed = 0;
        for (const auto* issues : {&loaded.row_errors, &loaded.warnings}) {
            const bool rows = issues == &loaded.row_errors;
            for (const auto& w : *issues) {
                if (listed++ == kMaxListed) break;
                ctx.warn(w.file + ", row " + std::to_string(w.row) +
                         (w.column.empty() ? "" : ", column '" + w.column + "'") + ": " + w.message +
                         (rows ? " (row skipped)" : ""));
            }
        }
        if (listed > kMaxListed) {
            ctx.warn(file + ": " + std::to_string(loaded.warnings.size()) + " field warnings and " +
                     std::to_string(loaded.row_errors.size()) + " skipped rows in total");
        }
        ctx.info("loaded " + std::to_string(loaded.records.size()) + " of " + std::to_string(loaded.data_rows) +
                 " rows from " + file);
        batches.push_back(std::move(loaded.records));
    }
    return ingest::merge_datasets(std::move(batches));
}

std::vector<ingest::ReportRecord> load_merged(const Context& ctx) {
    return ingest::parse_reports(ctx.read("merged.csv", "merge"), "merged.csv", ingest::SchemaMode::Lenient)
        .records;
}

ingest::UniqueDescriptionTable load_unique(const Context& ctx) {
    return ingest::unique_from_csv(ctx.read("unique.csv", "dedupe"));
}

struct ThetaTable {
    std::vector<std::size_t> ids;
    Matrix theta;
};

ThetaTable load_theta(const Context& ctx) {
    const auto rows = csv::parse(ctx.read("theta.csv", "topics"));
    if (rows.empty() || rows.front().empty() || rows.front().front() != "description_id") {
        throw DataError("theta.csv: unexpected header");
    }
    const std::size_t k = rows.front().size() - 1;
    ThetaTable t{{}, Matrix(rows.size() - 1, k)};
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != k + 1) throw DataError("theta.csv: malformed row " + std::to_string(r));
        t.ids.push_back(static_cast<std::size_t>(csv::parse_int(rows[r][0])));
        for (std::size_t c = 0; c < k; ++c) t.theta(r - 1, c) = csv::parse_double(rows[r][c + 1]);
    }
    return t;
}

report::Assignments load_assignments(const Context& ctx) {
    const auto rows = csv::parse(ctx.read("assignments.csv", "cluster"));
    if (rows.empty() || rows.front() != csv::Row{"description_id", "cluster"}) {
        throw DataError("assignments.csv: unexpected header");
    }
    report::Assignments assignments;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 2) throw DataError("assignments.csv: malformed row " + std::to_string(r));
        assignments[static_cast<std::size_t>(csv::parse_int(rows[r][0]))] =
            static_cast<std::size_t>(csv::parse_int(rows[r][1]));
    }
    return assignments;
}

textprep::StopwordSet stopwords(const Context& ctx) {
    return ctx.opt.stopwords.empty() ? textprep::default_stopwords() : textprep::load_stopwords(ctx.opt.stopwords);
}

report::CategoryRules cluster_rules(const Context& ctx) {
    return ctx.opt.rules.empty() ? report::default_cluster_rules() : report::load_rules(ctx.opt.rules);
}

report::CategoryRules drill_rules(const Context& ctx) {
    return ctx.opt.drill_rules.empty() ? report::default_drill_rules() : report::load_rules(ctx.opt.drill_rules);
}

topicmodel::LdaConfig lda_config(const Context& ctx) {
    topicmodel::LdaConfig config;
    config.num_topics = ctx.opt.topics;
    config.alpha = ctx.opt.alpha;
    config.beta = ctx.opt.beta;
    config.iterations = ctx.opt.lda_iterations;
    config.seed = ctx.stage_seed("lda");
    return config;
}

cluster::KmeansConfig kmeans_config(const Context& ctx) {
    cluster::KmeansConfig config;
    config.max_iterations = ctx.opt.kmeans_iterations;
    config.restarts = ctx.opt.restarts;
    config.seed = ctx.stage_seed("kmeans");
    return config;
}

embed::TsneConfig tsne_config(const Context& ctx) {
    embed::TsneConfig config;
    config.perplexity = ctx.opt.perplexity;
    config.learning_rate = ctx.opt.learning_rate;
    config.iterations = ctx.opt.tsne_iterations;
    config.seed = ctx.stage_seed("tsne");
    return config;
}

// ----------------------------------------------------------------- stages

void stage_merge(Context& ctx, const std::vector<std::string>& files) {
    const auto records = load_inputs(ctx, files);
    ctx.write("merged.csv", ingest::records_to_csv(records));
    std::vector<std::string> makers;
    for (const auto& r : records) makers.push_back(r.manufacturer);
    std::sort(makers.begin(), makers.end());
    makers.erase(std::unique(makers.begin(), makers.end()), makers.end());
    ctx.info("merged " + std::to_string(records.size()) + " records from " + std::to_string(makers.size()) +
             " manufacturers");
}

void stage_dedupe(Context& ctx, const std::vector<std::string>& files) {
    const auto records = files.empty() ? load_merged(ctx) : load_inputs(ctx, files);
    const auto table = ingest::extract_unique(records);
    ctx.write("unique.csv", ingest::unique_to_csv(table));
    if (ctx.opt.format == "json") ctx.write("unique.json", ingest::unique_to_json(table).dump(2) + "\n");
    ctx.info(std::to_string(table.entries.size()) + " unique descriptions from " + std::to_string(records.size()) +
             " records");
}

struct Prepared {
    std::vector<textprep::TokenizedDoc> docs;
    textprep::Vocabulary full;
    textprep::Vocabulary vocab;
    std::vector<textprep::BowDoc> corpus;
};

Prepared prepare(const Context& ctx, const std::vector<std::pair<std::size_t, std::string>>& texts) {
    Prepared p;
    textprep::RejectLog rejected;
    const auto words = stopwords(ctx);
    for (const auto& [id, text] : texts) {
        p.docs.push_back({id, textprep::tokenize_normalize(text, words, &rejected)});
    }
    for (const auto& token : rejected) ctx.warn("dropped token with non-ASCII letters: '" + token + "'");
    p.full = textprep::build_vocabulary(p.docs);
    p.vocab = textprep::filter_vocabulary(p.full, ctx.opt.min_doc_count, ctx.opt.max_doc_fraction);
    for (const auto& doc : p.docs) p.corpus.push_back(textprep::to_bow(doc.tokens, p.vocab, doc.description_id));
    return p;
}

void stage_prep(Context& ctx) {
    const auto table = load_unique(ctx);
    std::vector<std::pair<std::size_t, std::string>> texts;
    for (const auto& e : table.entries) texts.emplace_back(e.description_id, e.text);
    const auto p = prepare(ctx, texts);

    const auto tokens = textprep::tokens_to_json(p.docs);
    auto vocab = textprep::vocabulary_to_json(p.vocab);
    vocab["unfiltered_size"] = p.full.size();
    vocab["min_doc_count"] = ctx.opt.min_doc_count;
    vocab["max_doc_fraction"] = ctx.opt.max_doc_fraction;
    ctx.write("tokens.json", tokens.dump(1) + "\n");
    ctx.write("vocab.json", vocab.dump(1) + "\n");
    ctx.write("corpus.json", textprep::corpus_to_json(p.corpus).dump(1) + "\n");
    if (ctx.opt.dump_tokens) ctx.out << tokens.dump(2) << '\n';
    if (ctx.opt.dump_vocab) ctx.out << vocab.dump(2) << '\n';
    ctx.info("vocabulary: " + std::to_string(p.vocab.size()) + " words kept of " + std::to_string(p.full.size()));
}

Table theta_table(const topicmodel::LdaModel& model) {
    Table t;
    t.header.push_back("description_id");
    for (std::size_t k = 0; k < model.theta.cols(); ++k) t.header.push_back("topic_" + std::to_string(k));
    for (std::size_t d = 0; d < model.theta.rows(); ++d) {
        std::vector<json> row{model.description_ids[d]};
        for (const double v : model.theta.row(d)) row.emplace_back(v);
        t.rows.push_back(std::move(row));
    }
    return t;
}

void stage_topics(Context& ctx) {
    const auto vocab = textprep::vocabulary_from_json(ctx.read_json("vocab.json", "prep"));
    const auto corpus = textprep::corpus_from_json(ctx.read_json("corpus.json", "prep"));
    const auto table = load_unique(ctx);
    const auto model = topicmodel::fit_lda(corpus, vocab, lda_config(ctx));

    ctx.write("lda_model.json", topicmodel::model_to_json(model).dump(1) + "\n");
    Table summary{{"description_id", "text", "dominant_topic", "percent_contribution", "topic_keywords"}, {}};
    for (const auto id : model.description_ids) {
        const auto s = topicmodel::summarize_topics(model, id, ctx.opt.keywords);
        const std::string text = id < table.entries.size() ? table.entries[id].text : "";
        summary.rows.push_back({s.description_id, text, s.dominant_topic, s.percent_contribution, s.keywords});
    }
    write_table(ctx, "topic_summary", summary);
    // theta.csv is the clustering input and always CSV.
    const auto theta = theta_table(model);
    std::vector<csv::Row> rows{theta.header};
    for (const auto& r : theta.rows) {
        csv::Row text;
        for (const auto& v : r) text.push_back(cell_text(v));
        rows.push_back(std::move(text));
    }
    ctx.write("theta.csv", csv::to_string(rows));
    ctx.info("fitted " + std::to_string(model.config.num_topics) + " topics over " +
             std::to_string(corpus.size()) + " documents");
}

void stage_select_k(Context& ctx) {
    const auto theta = load_theta(ctx);
    const auto sweep = cluster::select_k(theta.theta, ctx.opt.k_min, ctx.opt.k_max, kmeans_config(ctx));
    Table t{{"k", "mean_silhouette"}, {}};
    std::vector<svg::ScatterPoint> points;
    for (const auto& [k, s] : sweep.scores) {
        t.rows.push_back({k, s});
        points.push_back({static_cast<double>(k), s, k == sweep.best_k ? 3u : 0u});
    }
    write_table(ctx, "silhouette", t);
    ctx.write("silhouette.svg", svg::scatter_plot(points, {.title = "Average silhouette score by number of clusters",
                                                          .x_label = "k",
                                                          .y_label = "mean silhouette",
                                                          .connect = true,
                                                          .integer_x_ticks = true}));
    ctx.info("best k = " + std::to_string(sweep.best_k));
}

std::size_t best_k_from_sweep(const Context& ctx) {
    const auto rows = csv::parse(ctx.read("silhouette.csv", "select-k"));
    if (rows.size() < 2 || rows.front() != csv::Row{"k", "mean_silhouette"}) {
        throw DataError("silhouette.csv: unexpected contents");
    }
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto k = static_cast<std::size_t>(csv::parse_int(rows[r].at(0)));
        const double s = csv::parse_double(rows[r].at(1));
        if (best == 0 || s > best_score || (s == best_score && k < best)) {
            best = k;
            best_score = s;
        }
    }
    return best;
}

void stage_cluster(Context& ctx) {
    const auto theta = load_theta(ctx);
    auto config = kmeans_config(ctx);
    config.k = ctx.opt.k ? *ctx.opt.k : best_k_from_sweep(ctx);
    config.seed = cluster::seed_for_k(config.seed, config.k);
    const auto fit = cluster::kmeans_fit(theta.theta, config);
    Table t{{"description_id", "cluster"}, {}};
    for (std::size_t i = 0; i < theta.ids.size(); ++i) t.rows.push_back({theta.ids[i], fit.assignments[i]});
    write_table(ctx, "assignments", t);
    ctx.info("k-means with k = " + std::to_string(config.k) + ": inertia " + csv::format_double(fit.inertia));
}

void stage_embed(Context& ctx) {
    const auto theta = load_theta(ctx);
    const auto assignments = load_assignments(ctx);
    auto config = tsne_config(ctx);
    const double limit = embed::perplexity_limit(theta.theta.rows());
    if (config.perplexity >= limit) {
        const double reduced = std::floor(limit - 1e-9);
        ctx.warn("perplexity " + csv::format_double(config.perplexity) + " too large for " +
                 std::to_string(theta.theta.rows()) + " points; using " + csv::format_double(reduced));
        config.perplexity = reduced;
    }
    ctx.used_perplexity = config.perplexity;
    const auto embedding = embed::tsne_embed(theta.theta, config);

    Table t{{"description_id", "x", "y", "cluster"}, {}};
    std::vector<svg::ScatterPoint> points;
    for (std::size_t i = 0; i < theta.ids.size(); ++i) {
        const auto it = assignments.find(theta.ids[i]);
        if (it == assignments.end()) {
            throw DataError("description " + std::to_string(theta.ids[i]) + " has no cluster assignment");
        }
        const double x = embedding.coordinates(i, 0), y = embedding.coordinates(i, 1);
        t.rows.push_back({theta.ids[i], x, y, it->second});
        points.push_back({x, y, it->second});
    }
    write_table(ctx, "embedding", t);
    ctx.write("embedding.svg", svg::scatter_plot(points, {.title = "Clusters after t-SNE",
                                                         .x_label = "t-SNE 1",
                                                         .y_label = "t-SNE 2",
                                                         .legend = true}));
    ctx.info("t-SNE final KL divergence " + csv::format_double(embedding.final_kl));
}

void stage_report(Context& ctx) {
    const auto docs = textprep::tokens_from_json(ctx.read_json("tokens.json", "prep"));
    const auto assignments = load_assignments(ctx);
    const auto records = load_merged(ctx);
    const auto table = load_unique(ctx);
    const auto heatmap = report::heatmap_counts(docs, assignments, ctx.opt.top_words,
                                                ctx.opt.weighted ? &table : nullptr);
    const auto labels = report::categorize_clusters(heatmap, cluster_rules(ctx));
    const auto freq = report::merge_back(records, table, assignments);

    std::vector<std::string> columns;
    Table h{{"word"}, {}};
    for (std::size_t c = 0; c < heatmap.num_clusters; ++c) {
        columns.push_back(std::to_string(c));
        h.header.push_back("cluster_" + std::to_string(c));
    }
    for (std::size_t w = 0; w < heatmap.words.size(); ++w) {
        std::vector<json> row{heatmap.words[w]};
        for (const auto v : heatmap.counts[w]) row.emplace_back(v);
        h.rows.push_back(std::move(row));
    }
    write_table(ctx, "heatmap", h);
    ctx.write("heatmap.svg", svg::heatmap("Most common words per cluster", heatmap.words, columns, heatmap.counts));

    Table f{{"cluster", "records", "category"}, {}};
    std::vector<std::string> bar_labels;
    std::vector<double> bar_values;
    for (std::size_t c = 0; c < freq.counts.size(); ++c) {
        f.rows.push_back({c, freq.counts[c], labels[c]});
        bar_labels.push_back(std::to_string(c) + " " + labels[c]);
        bar_values.push_back(static_cast<double>(freq.counts[c]));
    }
    write_table(ctx, "frequency", f);
    ctx.write("frequency.svg", svg::bar_chart("Frequency of clusters", bar_labels, bar_values, "reports"));

    Table cat{{"cluster", "category", "top_words"}, {}};
    for (std::size_t c = 0; c < labels.size(); ++c) cat.rows.push_back({c, labels[c], heatmap.top_words(c, 10)});
    write_table(ctx, "categories", cat);
    ctx.info("merged back " + std::to_string(freq.total) + " records into " + std::to_string(freq.counts.size()) +
             " clusters");
}

// Re-runs topic modeling and clustering on the descriptions of one cluster.
void recluster(Context& ctx, std::size_t cluster_id, const ingest::UniqueDescriptionTable& table,
               const report::Assignments& assignments) {
    std::vector<std::pair<std::size_t, std::string>> texts;
    for (const auto& e : table.entries) {
        if (assignments.at(e.description_id) == cluster_id) texts.emplace_back(e.description_id, e.text);
    }
    const std::string stem = "drill_cluster_" + std::to_string(cluster_id) + "_recluster";
    Table t{{"description_id", "subcluster", "records"}, {}};
    const std::size_t n = texts.size();
    std::vector<std::size_t> sub(n, 0);
    const auto p = prepare(ctx, texts);
    std::size_t tokens = 0;
    for (const auto& d : p.corpus) tokens += d.total();
    if (n >= 3 && !p.vocab.empty() && tokens > 0) {
        auto lda = lda_config(ctx);
        lda.seed = derive_seed(ctx.stage_seed("recluster-lda"), cluster_id);
        const auto model = topicmodel::fit_lda(p.corpus, p.vocab, lda);
        auto km = kmeans_config(ctx);
        km.seed = derive_seed(ctx.stage_seed("recluster-kmeans"), cluster_id);
        const std::size_t k_max = std::min(ctx.opt.k_max, n - 1);
        const std::size_t k_min = std::min(ctx.opt.k_min, k_max);
        const auto sweep = cluster::select_k(model.theta, k_min, k_max, km);
        km.k = sweep.best_k;
        km.seed = cluster::seed_for_k(km.seed, km.k);
        sub = cluster::kmeans_fit(model.theta, km).assignments;
        ctx.info("re-clustered " + std::to_string(n) + " descriptions of cluster " + std::to_string(cluster_id) +
                 " into " + std::to_string(km.k) + " sub-clusters");
    } else {
        ctx.warn("cluster " + std::to_string(cluster_id) + " is too small to re-cluster; kept as one sub-cluster");
    }
    for (std::size_t i = 0; i < n; ++i) {
        t.rows.push_back({texts[i].first, sub[i], table.entries[texts[i].first].occurrence_count});
    }
    write_table(ctx, stem, t);
}

void stage_drill(Context& ctx, std::size_t cluster_id) {
    const auto records = load_merged(ctx);
    const auto table = load_unique(ctx);
    const auto assignments = load_assignments(ctx);
    const auto rules = drill_rules(ctx);
    const auto drill = report::drill_down(cluster_id, records, table, assignments, rules);

    const std::string stem = "drill_cluster_" + std::to_string(cluster_id);
    Table t{{"kind", "category", "records"}, {}};
    std::vector<std::string> bar_labels;
    std::vector<double> bar_values;
    for (const auto& [name, count] : drill.category_counts) {
        t.rows.push_back({"category", name, count});
        bar_labels.push_back(name);
        bar_values.push_back(static_cast<double>(count));
    }
    std::vector<std::string> pie_labels;
    std::vector<double> pie_values;
    std::size_t hybrid_total = 0;
    for (const auto& [key, count] : drill.hybrid_counts) {
        t.rows.push_back({"hybrid", report::hybrid_label(key), count});
        pie_labels.push_back(report::hybrid_label(key));
        pie_values.push_back(static_cast<double>(count));
        hybrid_total += count;
    }
    t.rows.push_back({"uncategorized", report::kUncategorized, drill.uncategorized});
    t.rows.push_back({"total", "", drill.total});
    write_table(ctx, stem, t);

    Table d{{"description_id", "records", "categories"}, {}};
    for (const auto& m : drill.matches) d.rows.push_back({m.description_id, m.records, m.categories});
    write_table(ctx, stem + "_descriptions", d);

    if (rules.hybrid_enabled) {
        bar_labels.emplace_back("Hybrid");
        bar_values.push_back(static_cast<double>(hybrid_total));
    }
    bar_labels.emplace_back(report::kUncategorized);
    bar_values.push_back(static_cast<double>(drill.uncategorized));
    ctx.write(stem + "_hybrids.svg",
              svg::pie_chart("Combined factors in cluster " + std::to_string(cluster_id), pie_labels, pie_values));
    ctx.write(stem + "_categories.svg",
              svg::bar_chart("Categories in cluster " + std::to_string(cluster_id), bar_labels, bar_values,
                             "reports"));
    if (ctx.opt.recluster) recluster(ctx, cluster_id, table, assignments);
    ctx.info("drilled into cluster " + std::to_string(cluster_id) + " (" + std::to_string(drill.total) +
             " records)");
}

std::size_t largest_cluster(const Context& ctx) {
    const auto freq = report::merge_back(load_merged(ctx), load_unique(ctx), load_assignments(ctx));
    return static_cast<std::size_t>(std::max_element(freq.counts.begin(), freq.counts.end()) - freq.counts.begin());
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json resource_digest(const std::string& path, std::string_view bundled) {
    if (path.empty()) return {{"source", "bundled"}, {"sha256", sha256_hex(bundled)}};
    return {{"source", path}, {"sha256", sha256_file(path)}};
}

void write_manifest(Context& ctx, std::size_t drilled) {
    const auto& o = ctx.opt;
    auto inputs = json::array();
    for (const auto& f : o.inputs) inputs.push_back({{"path", f}, {"sha256", sha256_file(f)}});
    auto artifacts = json::array();
    auto names = ctx.written;
    std::sort(names.begin(), names.end());
    for (const auto& name : names) {
        artifacts.push_back({{"path", name}, {"sha256", sha256_file(ctx.out_dir / name)}});
    }
    const auto lda = lda_config(ctx);
    const auto km = kmeans_config(ctx);
    const auto tsne = tsne_config(ctx);
    const json manifest = {
        {"tool", kToolName},
        {"version", kToolVersion},
        {"created_at", utc_timestamp()},
        {"seed", o.seed},
        {"inputs", std::move(inputs)},
        {"stages",
         {{"ingest", {{"schema_mode", o.strict ? "strict" : "lenient"}}},
          {"prep",
           {{"min_doc_count", o.min_doc_count},
            {"max_doc_fraction", o.max_doc_fraction},
            {"stopwords", resource_digest(o.stopwords, resources::default_stopwords_text())}}},
          {"topics",
           {{"num_topics", lda.num_topics},
            {"alpha", lda.effective_alpha()},
            {"beta", lda.beta},
            {"iterations", lda.iterations},
            {"seed", lda.seed},
            {"keywords", o.keywords}}},
          {"select_k", {{"k_min", o.k_min}, {"k_max", o.k_max}}},
          {"cluster",
           {{"k", o.k ? json(*o.k) : json("best silhouette")},
            {"restarts", km.restarts},
            {"max_iterations", km.max_iterations},
            {"tolerance", km.tolerance},
            {"seed", km.seed}}},
          {"embed",
           {{"perplexity", ctx.used_perplexity > 0.0 ? ctx.used_perplexity : tsne.perplexity},
            {"learning_rate", tsne.learning_rate},
            {"iterations", tsne.iterations},
            {"early_exaggeration", tsne.early_exaggeration},
            {"exaggeration_iterations", tsne.exaggeration_iterations},
            {"seed", tsne.seed}}},
          {"report",
           {{"top_words", o.top_words},
            {"weighted", o.weighted},
            {"rules", resource_digest(o.rules, resources::default_cluster_rules_text())}}},
          {"drill",
           {{"cluster", drilled},
            {"recluster", o.recluster},
            {"rules", resource_digest(o.drill_rules, resources::default_drill_rules_text())}}}}},
        {"artifacts", std::move(artifacts)},
    };
    ctx.write("manifest.json", manifest.dump(2) + "\n");
}

void stage_run(Context& ctx) {
    stage_merge(ctx, ctx.opt.inputs);
    stage_dedupe(ctx, {});
    stage_prep(ctx);
    stage_topics(ctx);
    stage_select_k(ctx);
    stage_cluster(ctx);
    stage_embed(ctx);
    stage_report(ctx);
    const std::size_t drilled = ctx.opt.drill_cluster ? *ctx.opt.drill_cluster : largest_cluster(ctx);
    stage_drill(ctx, drilled);
    write_manifest(ctx, drilled);
}

void stage_fixture(Context& ctx) {
    const auto fx = fixture::generate({.seed = ctx.opt.seed});
    for (const auto& f : fx.files) ctx.write(f.name, f.contents);
    ctx.write("ground_truth.json", fx.ground_truth().dump(2) + "\n");
    ctx.info("wrote synthetic fixture: " + std::to_string(fx.total_records()) + " records, " +
             std::to_string(fx.descriptions.size()) + " unique descriptions");
}

}  // namespace

int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err, bool color) {
    Options opt;
    CLI::App app{"Disengagement report mining: topic modeling, clustering and reporting", kToolName};
    app.fallthrough();
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", kToolVersion);

    app.add_option("--seed", opt.seed, "Global random seed")->capture_default_str();
    app.add_option("--topics", opt.topics, "Number of LDA topics")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--k-min", opt.k_min, "Smallest k in the silhouette sweep")->capture_default_str();
    app.add_option("--k-max", opt.k_max, "Largest k in the silhouette sweep")->capture_default_str();
    app.add_option("--stopwords", opt.stopwords, "Stopword file (one word per line)");
    app.add_option("--rules", opt.rules, "Cluster category rules file");
    app.add_option("--drill-rules", opt.drill_rules, "Drill-down category rules file");
    app.add_option("--out", opt.out, "Artifact directory")->capture_default_str();
    app.add_option("--format", opt.format, "Table output format")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--strict", opt.strict, "Reject unrecognized enum values instead of warning");
    app.add_flag("--quiet", opt.quiet, "Only print warnings and errors");
    app.add_option("--alpha", opt.alpha, "LDA doc-topic prior (default 1/topics)");
    app.add_option("--beta", opt.beta, "LDA topic-word prior")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--lda-iterations", opt.lda_iterations, "Gibbs sweeps")->capture_default_str();
    app.add_option("--min-doc-count", opt.min_doc_count, "Minimum document frequency")->capture_default_str();
    app.add_option("--max-doc-fraction", opt.max_doc_fraction, "Maximum document frequency as a fraction")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--restarts", opt.restarts, "k-means++ restarts")->capture_default_str();
    app.add_option("--kmeans-iterations", opt.kmeans_iterations, "Lloyd iteration cap")->capture_default_str();
    app.add_option("--perplexity", opt.perplexity, "t-SNE perplexity")->capture_default_str();
    app.add_option("--learning-rate", opt.learning_rate, "t-SNE learning rate")->capture_default_str();
    app.add_option("--tsne-iterations", opt.tsne_iterations, "t-SNE iterations")->capture_default_str();
    app.add_option("--top-words", opt.top_words, "Heatmap rows")->capture_default_str();
    app.add_option("--keywords", opt.keywords, "Keywords per topic summary")->capture_default_str();
    app.add_flag("--weighted", opt.weighted, "Weight heatmap counts by report occurrences");

    auto* merge = app.add_subcommand("merge", "Merge report CSV files into merged.csv");
    merge->add_option("files", opt.inputs, "Report CSV files")->required();
    auto* dedupe = app.add_subcommand("dedupe", "Extract unique descriptions (from merged.csv or given files)");
    dedupe->add_option("files", opt.inputs, "Report CSV files");
    auto* prep = app.add_subcommand("prep", "Tokenize, build the vocabulary and bag-of-words corpus");
    prep->add_flag("--dump-tokens", opt.dump_tokens, "Print tokenized descriptions as JSON");
    prep->add_flag("--dump-vocab", opt.dump_vocab, "Print the vocabulary as JSON");
    auto* topics = app.add_subcommand("topics", "Fit LDA and write the topic summary");
    auto* select = app.add_subcommand("select-k", "Silhouette sweep over k");
    auto* cluster_cmd = app.add_subcommand("cluster", "k-means clustering of topic distributions");
    cluster_cmd->add_option("--k", opt.k, "Number of clusters (default: best silhouette)")
        ->check(CLI::PositiveNumber);
    auto* embed_cmd = app.add_subcommand("embed", "t-SNE projection to 2-D");
    auto* report_cmd = app.add_subcommand("report", "Heatmap, cluster frequencies and categories");
    auto* drill = app.add_subcommand("drill", "Categorize the descriptions of one cluster");
    drill->add_option("--cluster", opt.drill_cluster, "Cluster id")->required();
    drill->add_flag("--recluster", opt.recluster, "Also re-run topic modeling and clustering on the cluster");
    auto* run = app.add_subcommand("run", "Full pipeline");
    run->add_option("files", opt.inputs, "Report CSV files")->required();
    run->add_option("--cluster", opt.drill_cluster, "Cluster to drill into (default: largest)");
    run->add_flag("--recluster", opt.recluster, "Re-cluster the drilled cluster");
    auto* fixture_cmd = app.add_subcommand("fixture", "Write the synthetic report fixture into --out");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << (color ? "\033[31merror:\033[0m " : "error: ") << e.what() << "\n\n" << app.help();
        return 1;
    }

    Context ctx{opt, fs::path(opt.out), out, err, color, {}};
    try {
        if (opt.k_min > opt.k_max) throw UsageError("--k-min must not exceed --k-max");
        if (merge->parsed()) stage_merge(ctx, opt.inputs);
        else if (dedupe->parsed()) stage_dedupe(ctx, opt.inputs);
        else if (prep->parsed()) stage_prep(ctx);
        else if (topics->parsed()) stage_topics(ctx);
        else if (select->parsed()) stage_select_k(ctx);
        else if (cluster_cmd->parsed()) stage_cluster(ctx);
        else if (embed_cmd->parsed()) stage_embed(ctx);
        else if (report_cmd->parsed()) stage_report(ctx);
        else if (drill->parsed()) stage_drill(ctx, *opt.drill_cluster);
        else if (run->parsed()) stage_run(ctx);
        else if (fixture_cmd->parsed()) stage_fixture(ctx);
    } catch (const UsageError& e) {
        err << (color ? "\033[31merror:\033[0m " : "error: ") << e.what() << "\n\n" << app.help();
        return 1;
    } catch (const DataError& e) {
        err << (color ? "\033[31merror:\033[0m " : "error: ") << e.what() << '\n';
        return 2;
    } catch (const json::exception& e) {
        err << (color ? "\033[31merror:\033[0m " : "error: ") << "malformed artifact: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << (color ? "\033[31merror:\033[0m " : "error: ") << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace drmine::cli
