// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#include "cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "autoarabic/analytics.hpp"
#include "autoarabic/config.hpp"
#include "autoarabic/corpus_store.hpp"
#include "autoarabic/detect.hpp"
#include "autoarabic/didemo.hpp"
#include "autoarabic/errors.hpp"
#include "autoarabic/logging.hpp"
#include "autoarabic/retrieval.hpp"
#include "autoarabic/review.hpp"
#include "autoarabic/review_server.hpp"
#include "autoarabic/translate.hpp"

#ifndef AUTOARABIC_VERSION
#define AUTOARABIC_VERSION "0.0.0"
#endif

namespace autoarabic::cli {

namespace fs = std::filesystem;

std::string version_string() {
    return std::string("autoarabic ") + AUTOARABIC_VERSION + " (corpus format " +
           std::string(kCorpusHeader.substr(kCorpusHeader.rfind(' ') + 1)) + ")";
}

namespace {

constexpr std::string_view kDefaultMockTime = "2026-01-01T00:00:00Z";

std::atomic<bool> g_stop{false};

extern "C" void handle_stop_signal(int) { g_stop.store(true); }

/// Values bound to global flags, plus which of them were given.
struct Globals {
    std::string corpus;
    std::string config;
    std::string provider;
    std::uint64_t seed = 0;
    std::string out;
    std::string fixed_time;
    std::string cache_dir;
    CLI::Option* corpus_opt = nullptr;
    CLI::Option* provider_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* fixed_time_opt = nullptr;
    CLI::Option* cache_dir_opt = nullptr;
};

class Context {
public:
    Context(const Globals& g, std::ostream& out) : globals_(g), out_(out) {
        if (!g.config.empty()) cfg_.apply(ConfigFile::load(g.config));
        if (g.corpus_opt->count() > 0) cfg_.corpus = g.corpus;
        if (g.provider_opt->count() > 0) cfg_.provider = g.provider;
        if (g.seed_opt->count() > 0) cfg_.seed = g.seed;
        if (g.fixed_time_opt->count() > 0) cfg_.fixed_time = g.fixed_time;
        if (g.cache_dir_opt->count() > 0) cfg_.cache_dir = g.cache_dir;
        if (cfg_.provider != "mock" && cfg_.provider != "live") {
            throw ConfigError("--provider must be mock or live, got '" + cfg_.provider + "'");
        }
        cfg_.translate.provider_name = cfg_.provider;
        cfg_.judge.provider_name = cfg_.provider;
    }

    RunConfig& config() { return cfg_; }

    const fs::path& corpus_path() const {
        if (cfg_.corpus.empty()) throw ValidationError("no corpus given (use --corpus or corpus.path in the config)");
        return cfg_.corpus;
    }

    Corpus read_corpus() const { return load_current(corpus_path()); }

    void require_corpus_file() const {
        if (!fs::exists(corpus_path())) throw ValidationError("corpus file not found: " + corpus_path().string());
    }

    Clock clock() const {
        if (cfg_.fixed_time) return fixed_clock(parse_rfc3339(*cfg_.fixed_time));
        if (cfg_.provider == "mock") return fixed_clock(parse_rfc3339(kDefaultMockTime));
        return system_now;
    }

    CompletionClient make_client(const ProviderConfig& provider) const {
        std::shared_ptr<ResponseCache> cache;
        if (!cfg_.cache_dir.empty()) {
            cache = std::make_shared<ResponseCache>(cfg_.cache_dir);
        } else if (cfg_.provider == "live") {
            cache = std::make_shared<ResponseCache>(fs::path(corpus_path().string() + ".cache"));
        } else {
            cache = std::make_shared<ResponseCache>();
        }
        ProviderConfig effective = provider;
        if (cfg_.provider == "mock") effective.requests_per_minute = std::numeric_limits<int>::max();
        return CompletionClient(effective, make_backend(effective, cfg_.seed), std::move(cache));
    }

    /// Writes data to --out when given, else to the output stream.
    void emit(std::string_view data) {
        if (globals_.out.empty()) {
            out_ << data;
            out_.flush();
        } else {
            write_file_atomic(globals_.out, data);
        }
    }

private:
    const Globals& globals_;
    std::ostream& out_;
    RunConfig cfg_;
};

std::string escape_cell(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\\': out += "\\\\"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

void check_format(const std::string& format) {
    if (format != "csv" && format != "table") throw ValidationError("--format must be csv or table");
}

// --- commands ------------------------------------------------------------------

struct IngestArgs {
    std::vector<std::string> train, val, test;
    bool force = false;
};

void cmd_ingest(Context& ctx, const IngestArgs& a) {
    std::vector<DidemoSource> sources;
    for (const auto& p : a.train) sources.push_back({p, Split::train});
    for (const auto& p : a.val) sources.push_back({p, Split::validation});
    for (const auto& p : a.test) sources.push_back({p, Split::test});
    if (sources.empty()) throw ValidationError("ingest needs at least one of --train, --val, --test");
    const fs::path& path = ctx.corpus_path();
    if (fs::exists(path) && !a.force) {
        throw PreconditionError("corpus " + path.string() + " already exists (use --force to replace it)");
    }
    Corpus corpus = ingest_didemo(sources);
    fs::remove(journal_path(path));
    store(corpus, path);
    log::info("ingested " + std::to_string(corpus.size()) + " captions from " + std::to_string(corpus.videos().size()) +
              " videos into " + path.string());
}

struct TranslateArgs {
    std::size_t limit = 0;
    bool no_resume = false;
};

void cmd_translate(Context& ctx, const TranslateArgs& a) {
    ctx.require_corpus_file();
    CompletionClient client = ctx.make_client(ctx.config().translate);
    CorpusStore store(ctx.corpus_path(), ctx.config().compact_every);
    TranslateOptions opts;
    opts.resume = !a.no_resume;
    if (a.limit > 0) opts.limit = a.limit;
    opts.clock = ctx.clock();
    const auto s = translate_corpus(store, client, opts);
    store.compact();
    log::info("translated " + std::to_string(s.translated) + ", failed " + std::to_string(s.failed) + ", skipped " +
              std::to_string(s.skipped) + ", suffix cleanups " + std::to_string(s.suffix_removed));
    if (s.failed > 0) log::warn(std::to_string(s.failed) + " captions remain pending; rerun translate to retry them");
}

struct DetectArgs {
    std::string lexicon;
    double partial_ratio = kDefaultPartialRatio;
    bool rules_only = false;
    CLI::Option* partial_opt = nullptr;
};

LoanwordLexicon load_lexicon(const fs::path& path) {
    LoanwordLexicon lex = LoanwordLexicon::seed();
    if (!path.empty()) lex.merge(LoanwordLexicon::load(path));
    return lex;
}

void cmd_detect(Context& ctx, const DetectArgs& a) {
    ctx.require_corpus_file();
    if (!a.lexicon.empty()) ctx.config().lexicon = a.lexicon;
    if (a.partial_opt->count() > 0) ctx.config().partial_ratio = a.partial_ratio;
    const LoanwordLexicon lexicon = load_lexicon(ctx.config().lexicon);
    DetectOptions opts;
    opts.partial_ratio = ctx.config().partial_ratio;
    opts.clock = ctx.clock();
    CorpusStore store(ctx.corpus_path(), ctx.config().compact_every);
    DetectSummary s;
    if (a.rules_only) {
        const Corpus corpus = store.snapshot();
        for (const auto& [id, r] : corpus.captions()) {
            if (r.status != Status::translated && r.status != Status::flagged) continue;
            FlagRecord f = rule_flags(r, lexicon, opts);
            ++s.processed;
            if (!f.categories.empty()) ++s.flagged;
            store.update(id, [&](Corpus& c) { c.record_flags(std::move(f)); });
        }
    } else {
        CompletionClient judge = ctx.make_client(ctx.config().judge);
        s = detect_corpus(store, judge, lexicon, opts);
    }
    store.compact();
    log::info("detected over " + std::to_string(s.processed) + " captions: " + std::to_string(s.flagged) +
              " flagged, " + std::to_string(s.review_needed) + " need review, " + std::to_string(s.judge_failures) +
              " judge failures");
}

struct ServeArgs {
    std::string budget = "few";
    std::string bind;
    int port = -1;
    std::string static_dir;
};

void cmd_serve(Context& ctx, const ServeArgs& a) {
    ctx.require_corpus_file();
    auto& cfg = ctx.config();
    if (!a.bind.empty()) cfg.bind_address = a.bind;
    if (a.port >= 0) cfg.port = a.port;
    if (!a.static_dir.empty()) cfg.static_dir = a.static_dir;
    CorpusStore store(ctx.corpus_path(), cfg.compact_every);
    ReviewService service(store, budget_from_string(a.budget), ctx.clock());
    ReviewServer server(store, service, ServerOptions{cfg.bind_address, cfg.port, cfg.static_dir});
    g_stop.store(false);
    auto prev_int = std::signal(SIGINT, handle_stop_signal);
    auto prev_term = std::signal(SIGTERM, handle_stop_signal);
    server.start();
    while (!g_stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
    std::signal(SIGINT, prev_int);
    std::signal(SIGTERM, prev_term);
    log::info("review service stopped; corpus compacted");
}

void cmd_materialize(Context& ctx, const std::string& budget) {
    const Corpus corpus = ctx.read_corpus();
    std::string out = "caption_id\ttext\n";
    for (const auto& m : materialize(corpus, budget_from_string(budget))) {
        out += escape_cell(m.caption_id) + "\t" + escape_cell(m.text) + "\n";
    }
    ctx.emit(out);
}

void cmd_export(Context& ctx, const std::string& budget) {
    ctx.emit(export_materialized(ctx.read_corpus(), budget_from_string(budget)));
}

struct StatsArgs {
    std::string side = "source";
    int n = 4;
    std::string tags;
    std::string format = "csv";
    bool keep_case = false;
};

void cmd_stats_breakdown(Context& ctx, const StatsArgs& a) {
    check_format(a.format);
    const auto b = analytics::error_breakdown(ctx.read_corpus());
    ctx.emit(a.format == "csv" ? analytics::to_csv(b) : analytics::to_table(b));
}

void cmd_stats_ngrams(Context& ctx, const StatsArgs& a) {
    const auto side = analytics::side_from_string(a.side);
    analytics::TokenOptions opts;
    opts.lowercase_source = !a.keep_case;
    ctx.emit(analytics::to_csv(analytics::ngram_stats(ctx.read_corpus(), side, a.n, opts), side));
}

void cmd_stats_wordcount(Context& ctx, const StatsArgs& a) {
    const auto side = analytics::side_from_string(a.side);
    analytics::TokenOptions opts;
    opts.lowercase_source = !a.keep_case;
    ctx.emit(analytics::to_csv(analytics::wordcount_histogram(ctx.read_corpus(), side, opts), side));
}

void cmd_stats_pos(Context& ctx, const StatsArgs& a) {
    if (a.tags.empty()) throw ValidationError("stats pos needs --tags <file>");
    const auto side = analytics::side_from_string(a.side);
    analytics::TokenOptions opts;
    opts.lowercase_source = !a.keep_case;
    const auto tags = analytics::parse_tag_file(read_file(a.tags), a.tags);
    ctx.emit(analytics::to_csv(analytics::pos_stats(ctx.read_corpus(), tags, side, opts)));
}

struct RetrievalArgs {
    std::string sim, qids, cids, truth;
    std::string queries, candidates;
    std::string compare;
    std::vector<std::string> sweep;
    std::string direction = "text_to_video";
    std::string tie = "optimistic";
    std::string format = "table";
    int digits = 4;
    bool transpose = false;
};

retrieval::SimilarityMatrix load_matrix(const RetrievalArgs& a, const std::string& sim_path) {
    using namespace retrieval;
    if (a.truth.empty()) throw ValidationError("eval retrieval needs --truth <file>");
    const GroundTruth gt = read_ground_truth(a.truth);
    SimilarityMatrix m;
    if (!sim_path.empty()) {
        std::optional<fs::path> q, c;
        if (!a.qids.empty()) q = a.qids;
        if (!a.cids.empty()) c = a.cids;
        m = read_similarity(sim_path, q, c);
        if (a.transpose) m = m.transposed();
        m.set_ground_truth(gt);
    } else {
        if (a.queries.empty() || a.candidates.empty()) {
            throw ValidationError("eval retrieval needs --sim, --sweep, or both --queries and --candidates");
        }
        m = similarity_from_embeddings(read_embeddings(a.queries), read_embeddings(a.candidates), gt);
    }
    return m;
}

void cmd_eval_retrieval(Context& ctx, const RetrievalArgs& a) {
    using namespace retrieval;
    check_format(a.format);
    const Direction dir = direction_from_string(a.direction);
    const TieBreak tie = tie_break_from_string(a.tie);
    if (!a.sweep.empty()) {
        std::map<Budget, SimilarityMatrix> mats;
        for (const auto& spec : a.sweep) {
            const auto eq = spec.find('=');
            if (eq == std::string::npos) throw ValidationError("--sweep expects budget=path, got '" + spec + "'");
            const Budget b = budget_from_string(spec.substr(0, eq));
            if (mats.contains(b)) throw ValidationError("--sweep names budget " + spec.substr(0, eq) + " twice");
            mats.emplace(b, load_matrix(a, spec.substr(eq + 1)));
        }
        const auto s = budget_sweep(mats, dir, tie);
        ctx.emit(a.format == "csv" ? to_csv(s) : to_table(s));
        return;
    }
    const RetrievalReport rep = evaluate(load_matrix(a, a.sim), dir, tie);
    if (a.compare.empty()) {
        ctx.emit(a.format == "csv" ? to_csv(rep) : to_table(rep));
        return;
    }
    const RetrievalReport other = evaluate(load_matrix(a, a.compare), dir, tie);
    if (a.format == "csv") {
        ctx.emit(to_csv(compare_rounded(rep, other, a.digits)));
        return;
    }
    ctx.emit(comparison_table(rep, other, a.sim, a.compare, a.digits));
}

struct DetectorArgs {
    std::string gold;
    std::string pred;
    std::string format = "table";
};

void cmd_eval_detector(Context& ctx, const DetectorArgs& a) {
    check_format(a.format);
    if (a.gold.empty()) throw ValidationError("eval detector needs --gold <file>");
    const auto gold = analytics::parse_label_file(read_file(a.gold), a.gold);
    std::map<std::string, CategorySet> pred;
    if (!a.pred.empty()) {
        pred = analytics::parse_label_file(read_file(a.pred), a.pred);
    } else {
        const auto all = analytics::predicted_labels(ctx.read_corpus());
        std::vector<std::string> missing;
        for (const auto& [id, c] : gold) {
            auto it = all.find(id);
            if (it == all.end()) {
                missing.push_back(id);
            } else {
                pred.emplace(id, it->second);
            }
        }
        if (!missing.empty()) throw RecordValidationError("no detector output for gold captions", std::move(missing));
    }
    const auto report = analytics::detector_report(gold, pred);
    ctx.emit(a.format == "csv" ? analytics::to_csv(report) : analytics::to_table(report));
}

/// Routes library log messages to `err` for the duration of a run.
class SinkScope {
public:
    explicit SinkScope(std::ostream& err)
        : previous_(log::set_sink([&err](log::Level level, std::string_view m) {
              static const char* names[] = {"info", "warning", "error"};
              err << "autoarabic: " << names[static_cast<int>(level)] << ": " << m << "\n";
          })) {}
    ~SinkScope() { log::set_sink(std::move(previous_)); }

private:
    log::Sink previous_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    SinkScope sinks(err);
    CLI::App app{"Localize a video-caption dataset into Arabic: ingest, translate, detect, review, evaluate.",
                 "autoarabic"};
    app.fallthrough();
    app.require_subcommand(1);

    Globals g;
    g.corpus_opt = app.add_option("--corpus", g.corpus, "Corpus file");
    app.add_option("--config", g.config, "Run configuration file")->check(CLI::ExistingFile);
    g.provider_opt = app.add_option("--provider", g.provider, "LLM provider: live or mock");
    g.seed_opt = app.add_option("--seed", g.seed, "Seed for the mock provider");
    app.add_option("--out", g.out, "Write data here instead of standard output");
    g.fixed_time_opt = app.add_option("--fixed-time", g.fixed_time, "RFC 3339 timestamp used for every record");
    g.cache_dir_opt = app.add_option("--cache-dir", g.cache_dir, "Response cache directory");
    bool show_version = false;
    app.add_flag("--version", show_version, "Print version and corpus format version");

    std::function<void(Context&)> action;

    IngestArgs ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Build a corpus from DiDeMo annotation files");
    c_ingest->add_option("--train", ingest.train, "Training-split annotation file")->check(CLI::ExistingFile);
    c_ingest->add_option("--val", ingest.val, "Validation-split annotation file")->check(CLI::ExistingFile);
    c_ingest->add_option("--test", ingest.test, "Test-split annotation file")->check(CLI::ExistingFile);
    c_ingest->add_flag("--force", ingest.force, "Replace an existing corpus");
    c_ingest->callback([&] { action = [&](Context& ctx) { cmd_ingest(ctx, ingest); }; });

    TranslateArgs translate;
    auto* c_translate = app.add_subcommand("translate", "Translate pending captions");
    c_translate->add_option("--limit", translate.limit, "Stop after this many captions");
    c_translate->add_flag("--no-resume", translate.no_resume, "Require a corpus without translations");
    c_translate->callback([&] { action = [&](Context& ctx) { cmd_translate(ctx, translate); }; });

    DetectArgs detect;
    auto* c_detect = app.add_subcommand("detect", "Flag translation errors with rules and the judge");
    c_detect->add_option("--lexicon", detect.lexicon, "Loanword lexicon TSV")->check(CLI::ExistingFile);
    detect.partial_opt = c_detect->add_option("--partial-ratio", detect.partial_ratio, "Partial-translation ratio");
    c_detect->add_flag("--rules-only", detect.rules_only, "Skip the LLM judge");
    c_detect->callback([&] { action = [&](Context& ctx) { cmd_detect(ctx, detect); }; });

    ServeArgs serve;
    auto* c_review = app.add_subcommand("review", "Human review stage");
    c_review->require_subcommand(1);
    auto* c_serve = c_review->add_subcommand("serve", "Run the review HTTP service");
    c_serve->add_option("--budget", serve.budget, "Budget the service works under")->capture_default_str();
    c_serve->add_option("--bind", serve.bind, "Bind address");
    c_serve->add_option("--port", serve.port, "Port (0 picks a free one)");
    c_serve->add_option("--static", serve.static_dir, "Directory of UI assets served at /");
    c_serve->callback([&] { action = [&](Context& ctx) { cmd_serve(ctx, serve); }; });

    std::string mat_budget;
    auto* c_mat = app.add_subcommand("materialize", "Caption text table implied by a budget");
    c_mat->add_option("--budget", mat_budget, "zero, few or full")->required();
    c_mat->callback([&] { action = [&](Context& ctx) { cmd_materialize(ctx, mat_budget); }; });

    std::string export_budget = "full";
    auto* c_export = app.add_subcommand("export", "Corpus file with budget-materialized text");
    c_export->add_option("--budget", export_budget, "zero, few or full")->capture_default_str();
    c_export->callback([&] { action = [&](Context& ctx) { cmd_export(ctx, export_budget); }; });

    StatsArgs stats;
    auto* c_stats = app.add_subcommand("stats", "Corpus statistics");
    c_stats->require_subcommand(1);
    auto add_side = [&](CLI::App* sub) {
        sub->add_option("--side", stats.side, "source or target")->capture_default_str();
        sub->add_flag("--keep-case", stats.keep_case, "Do not lowercase the English side");
    };
    auto* s_breakdown = c_stats->add_subcommand("breakdown", "Error-category breakdown");
    s_breakdown->add_option("--format", stats.format, "csv or table")->capture_default_str();
    s_breakdown->callback([&] { action = [&](Context& ctx) { cmd_stats_breakdown(ctx, stats); }; });
    auto* s_ngrams = c_stats->add_subcommand("ngrams", "Unique n-gram counts");
    add_side(s_ngrams);
    s_ngrams->add_option("--n", stats.n, "Largest n")->capture_default_str()->check(CLI::Range(1, 16));
    s_ngrams->callback([&] { action = [&](Context& ctx) { cmd_stats_ngrams(ctx, stats); }; });
    auto* s_pos = c_stats->add_subcommand("pos", "Unique surface forms per part of speech");
    add_side(s_pos);
    s_pos->add_option("--tags", stats.tags, "Tag file")->required()->check(CLI::ExistingFile);
    s_pos->callback([&] { action = [&](Context& ctx) { cmd_stats_pos(ctx, stats); }; });
    auto* s_wc = c_stats->add_subcommand("wordcount", "Caption length histogram");
    add_side(s_wc);
    s_wc->callback([&] { action = [&](Context& ctx) { cmd_stats_wordcount(ctx, stats); }; });

    auto* c_eval = app.add_subcommand("eval", "Evaluation");
    c_eval->require_subcommand(1);
    RetrievalArgs ret;
    auto* e_ret = c_eval->add_subcommand("retrieval", "Recall@K, MedR and MeanR");
    e_ret->add_option("--sim", ret.sim, "SIM1 similarity file")->check(CLI::ExistingFile);
    e_ret->add_option("--qids", ret.qids, "Query id file (default <sim>.qids)");
    e_ret->add_option("--cids", ret.cids, "Candidate id file (default <sim>.cids)");
    e_ret->add_option("--truth", ret.truth, "Ground truth TSV")->check(CLI::ExistingFile);
    e_ret->add_option("--queries", ret.queries, "EMB1 query embeddings")->check(CLI::ExistingFile);
    e_ret->add_option("--candidates", ret.candidates, "EMB1 candidate embeddings")->check(CLI::ExistingFile);
    e_ret->add_option("--compare", ret.compare, "Second SIM1 file; report deltas against --sim");
    e_ret->add_option("--sweep", ret.sweep, "budget=SIM1 file, once per budget");
    e_ret->add_option("--direction", ret.direction, "text_to_video or video_to_text")->capture_default_str();
    e_ret->add_option("--tie-break", ret.tie, "optimistic or pessimistic")->capture_default_str();
    e_ret->add_option("--format", ret.format, "csv or table")->capture_default_str();
    e_ret->add_option("--digits", ret.digits, "Decimals for recalls in --compare output")
        ->check(CLI::Range(1, 6))
        ->capture_default_str();
    e_ret->add_flag("--transpose", ret.transpose, "Swap query and candidate roles of the matrix");
    e_ret->callback([&] { action = [&](Context& ctx) { cmd_eval_retrieval(ctx, ret); }; });

    DetectorArgs det;
    auto* e_det = c_eval->add_subcommand("detector", "Detector precision, recall and F1");
    e_det->add_option("--gold", det.gold, "Gold label file")->required()->check(CLI::ExistingFile);
    e_det->add_option("--pred", det.pred, "Predicted label file (default: corpus detector output)")
        ->check(CLI::ExistingFile);
    e_det->add_option("--format", det.format, "csv or table")->capture_default_str();
    e_det->callback([&] { action = [&](Context& ctx) { cmd_eval_detector(ctx, det); }; });

    for (const auto& a : args) {
        if (a == "--version") {
            out << version_string() << "\n";
            return kExitOk;
        }
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        err << app.help();
        return kExitValidation;
    }

    try {
        Context ctx(g, out);
        if (action) action(ctx);
        return kExitOk;
    } catch (const ValidationError& e) {
        err << "autoarabic: error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "autoarabic: error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace autoarabic::cli
