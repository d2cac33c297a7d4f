// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#include "autoarabic/provider.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "autoarabic/arabic_text.hpp"
#include "autoarabic/hash.hpp"

namespace autoarabic {

ProviderConfig ProviderConfig::translation_defaults() {
    return ProviderConfig{};
}

ProviderConfig ProviderConfig::judge_defaults() {
    ProviderConfig c;
    c.model_name = "gpt-4o";
    c.temperature = 0.0;
    c.top_p = 1.0;
    c.api_key_env = "AUTOARABIC_JUDGE_KEY";
    c.base_url = "https://api.openai.com/v1";
    return c;
}

void ProviderConfig::validate() const {
    if (!(temperature >= 0.0 && temperature <= 2.0)) throw ConfigError("temperature must be in [0, 2]");
    if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("top_p must be in (0, 1]");
    if (max_parallel < 1) throw ConfigError("max_parallel must be positive");
    if (requests_per_minute < 1) throw ConfigError("requests_per_minute must be positive");
    if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
    if (provider_name != "mock" && provider_name != "live") {
        throw ConfigError("unknown provider '" + provider_name + "' (expected mock or live)");
    }
}

// --- prompts ---------------------------------------------------------------

namespace {

// Byte-exact, trailing spaces and quotes included.
constexpr std::string_view kTranslationTemplate =
    "\"You will receive an English sentence that \n"
    "serves as a caption for a short video clip. \n"
    "Your task is to translate this caption \n"
    "into Modern Standard Arabic while ensuring \n"
    "that the translation remains suitable  \n"
    "and appropriate as a caption.\n"
    "The English caption: {caption}\n"
    "Arabic caption:\"";

constexpr std::string_view kCaptionSlot = "{caption}";

constexpr std::string_view kJudgeTemplate =
    "You are reviewing a Modern Standard Arabic translation of an English video caption.\n"
    "Decide which of the following error categories apply to the translation.\n"
    "lexical: Selection of uncommon or overly formal words instead of familiar alternatives.\n"
    "literal: Word-for-word structural translation that produces unnatural Arabic phrasing.\n"
    "hallucination: Addition of content not present in the original English text.\n"
    "tense_shift: Incorrect temporal rendering of present actions in past tense.\n"
    "loanword: Inconsistent use of transliterated terms versus established Arabic equivalents.\n"
    "diacritics: Inconsistent application of diacritical marks across words and captions.\n"
    "If no category applies, the verdict is no_error.\n"
    "Reply with a single line and nothing else, in exactly one of these forms:\n"
    "FLAGS: <category>,<category>\n"
    "FLAGS: none\n"
    "English caption: {source}\n"
    "Arabic translation: {translation}";

constexpr std::string_view kSourceSlot = "{source}";
constexpr std::string_view kTranslationSlot = "{translation}";
constexpr std::string_view kJudgeSourceLabel = "English caption: ";
constexpr std::string_view kJudgeTranslationLabel = "\nArabic translation: ";

}  // namespace

std::string_view translation_prompt_template() noexcept { return kTranslationTemplate; }
std::string_view judge_prompt_template() noexcept { return kJudgeTemplate; }

std::string build_translation_prompt(std::string_view caption) {
    if (caption.empty()) throw PreconditionError("caption must be non-empty");
    const auto slot = kTranslationTemplate.find(kCaptionSlot);
    std::string out;
    out.reserve(kTranslationTemplate.size() + caption.size());
    out.append(kTranslationTemplate.substr(0, slot));
    out.append(caption);
    out.append(kTranslationTemplate.substr(slot + kCaptionSlot.size()));
    return out;
}

std::string build_judge_prompt(std::string_view source, std::string_view translation) {
    if (source.empty()) throw PreconditionError("source caption must be non-empty");
    if (translation.empty()) throw PreconditionError("translation must be non-empty");
    const auto s = kJudgeTemplate.find(kSourceSlot);
    const auto t = kJudgeTemplate.find(kTranslationSlot);
    std::string out;
    out.append(kJudgeTemplate.substr(0, s));
    out.append(source);
    out.append(kJudgeTemplate.substr(s + kSourceSlot.size(), t - s - kSourceSlot.size()));
    out.append(translation);
    out.append(kJudgeTemplate.substr(t + kTranslationSlot.size()));
    return out;
}

std::optional<std::string> caption_from_translation_prompt(std::string_view prompt) {
    const auto slot = kTranslationTemplate.find(kCaptionSlot);
    const auto prefix = kTranslationTemplate.substr(0, slot);
    const auto suffix = kTranslationTemplate.substr(slot + kCaptionSlot.size());
    if (prompt.size() < prefix.size() + suffix.size() || prompt.substr(0, prefix.size()) != prefix ||
        prompt.substr(prompt.size() - suffix.size()) != suffix) {
        return std::nullopt;
    }
    return std::string(prompt.substr(prefix.size(), prompt.size() - prefix.size() - suffix.size()));
}

std::optional<std::pair<std::string, std::string>> texts_from_judge_prompt(std::string_view prompt) {
    const auto head = kJudgeTemplate.substr(0, kJudgeTemplate.find(kSourceSlot));
    if (prompt.substr(0, head.size()) != head) return std::nullopt;
    const auto t = prompt.rfind(kJudgeTranslationLabel);
    if (t == std::string_view::npos || t < head.size()) return std::nullopt;
    return std::make_pair(std::string(prompt.substr(head.size(), t - head.size())),
                          std::string(prompt.substr(t + kJudgeTranslationLabel.size())));
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool is_word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

std::optional<CategorySet> parse_strict(std::string_view raw) {
    const std::string_view line = trim(raw);
    if (line.find('\n') != std::string_view::npos) return std::nullopt;
    constexpr std::string_view kPrefix = "FLAGS:";
    if (line.substr(0, kPrefix.size()) != kPrefix) return std::nullopt;
    const std::string_view body = trim(line.substr(kPrefix.size()));
    if (body == "none" || body == "no_error") return CategorySet{};
    CategorySet out;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        const auto comma = body.find(',', pos);
        const auto item = trim(body.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        auto c = category_from_token(item);
        if (!c) return std::nullopt;
        out.insert(*c);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

}  // namespace

JudgeVerdict parse_judge_output(std::string_view raw) {
    if (auto strict = parse_strict(raw)) return {*strict, VerdictKind::exact};

    CategorySet found;
    bool said_none = false;
    const std::string lowered = text::ascii_lower(raw);
    std::size_t i = 0;
    while (i < lowered.size()) {
        while (i < lowered.size() && !is_word_char(lowered[i])) ++i;
        const std::size_t begin = i;
        while (i < lowered.size() && is_word_char(lowered[i])) ++i;
        const std::string_view word(lowered.data() + begin, i - begin);
        if (word.empty()) continue;
        if (auto c = category_from_token(word)) {
            found.insert(*c);
        } else if (word == "none" || word == "no_error") {
            said_none = true;
        }
    }
    if (!found.empty() || said_none) return {found, VerdictKind::salvaged};
    return {{}, VerdictKind::parse_error};
}

// --- mock ------------------------------------------------------------------

MockBackend::MockBackend(std::uint64_t seed) : seed_(seed) {}

void MockBackend::set_response(std::string prompt, std::string response) {
    std::lock_guard lock(mu_);
    table_.insert_or_assign(std::move(prompt), std::move(response));
}

void MockBackend::fail_permanently_on(std::string needle) {
    std::lock_guard lock(mu_);
    permanent_.insert(std::move(needle));
}

void MockBackend::fail_transiently_on(std::string needle, int times) {
    std::lock_guard lock(mu_);
    transient_[std::move(needle)] = times;
}

namespace {

struct InFlightGuard {
    std::atomic<int>& counter;
    explicit InFlightGuard(std::atomic<int>& c, std::atomic<int>& max) : counter(c) {
        const int now = ++counter;
        int prev = max.load();
        while (now > prev && !max.compare_exchange_weak(prev, now)) {
        }
    }
    ~InFlightGuard() { --counter; }
};

constexpr std::array<std::pair<std::string_view, std::string_view>, 40> kGlossary = {{
    {"man", "الرجل"},       {"woman", "المرأة"},     {"girl", "الفتاة"},      {"boy", "الصبي"},
    {"person", "الشخص"},    {"people", "الناس"},     {"dog", "الكلب"},        {"cat", "القطة"},
    {"car", "السيارة"},     {"camera", "الكاميرا"},  {"water", "الماء"},      {"tree", "الشجرة"},
    {"walks", "يمشي"},      {"runs", "يركض"},        {"jumps", "يقفز"},       {"speaking", "بالتحدث"},
    {"starts", "تبدأ"},     {"first", "أولاً"},      {"left", "اليسار"},      {"right", "اليمين"},
    {"frame", "المشهد"},    {"screen", "الشاشة"},    {"ball", "الكرة"},       {"red", "الأحمر"},
    {"black", "الأسود"},    {"white", "الأبيض"},     {"zooms", "تقترب"},      {"players", "اللاعبين"},
    {"exits", "يخرج"},      {"enters", "يدخل"},      {"child", "الطفل"},      {"baby", "الرضيع"},
    {"street", "الشارع"},   {"house", "المنزل"},     {"road", "الطريق"},      {"bird", "الطائر"},
    {"turns", "يستدير"},    {"around", "حول"},       {"under", "تحت"},        {"arm", "ذراعه"},
}};

constexpr std::array<std::string_view, 24> kFiller = {
    "يظهر", "ثم", "بعد", "عند", "مع", "من", "إلى", "على", "في", "قرب", "نحو", "أمام",
    "خلف", "فوق", "بجانب", "ببطء", "بسرعة", "مرة", "أخرى", "جديد", "كبير", "صغير", "طويل", "قصير",
};

bool is_dropped_word(std::string_view w) {
    return w == "the" || w == "a" || w == "an" || w == "is" || w == "are";
}

}  // namespace

std::string MockBackend::pseudo_translate(std::string_view caption) const {
    const auto tokens = text::tokenize(text::ascii_lower(caption)).tokens;
    std::vector<std::string> words;
    for (const auto& t : tokens) {
        if (is_dropped_word(t)) continue;
        auto it = std::find_if(kGlossary.begin(), kGlossary.end(), [&](const auto& e) { return e.first == t; });
        if (it != kGlossary.end()) {
            words.emplace_back(it->second);
        } else {
            words.emplace_back(kFiller[fnv1a64(t, seed_) % kFiller.size()]);
        }
    }
    if (words.empty()) words.emplace_back(kFiller[fnv1a64(caption, seed_) % kFiller.size()]);

    const std::uint64_t h = fnv1a64(caption, seed_ ^ 0x9e3779b97f4a7c15ULL);
    if (h % 40 == 0) return words.front();  // partial translation

    if ((h >> 8) % 8 == 0) {
        // Sprinkle fatha after the first letter of every word.
        for (auto& w : words) {
            const auto cps = text::decode_utf8(w);
            std::u32string marked;
            for (std::size_t k = 0; k < cps.size(); ++k) {
                marked.push_back(cps[k]);
                if (k == 0 && cps[k] >= 0x0621 && cps[k] <= 0x064A) marked.push_back(0x064E);
            }
            w = text::encode_utf8(marked);
        }
    }
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) out.push_back(' ');
        out += w;
    }
    if ((h >> 16) % 20 == 0) out += " باللغة العربية";
    out += ".";
    return out;
}

std::string MockBackend::pseudo_judge(std::string_view source, std::string_view translation) const {
    const std::uint64_t h = fnv1a64(std::string(source) + "\x1f" + std::string(translation), seed_ ^ 0x5bd1e995ULL);
    if (h % 50 == 0) return "The translation reads well to me.";
    CategorySet cats;
    if (text::has_diacritics(translation)) cats.insert(ErrorCategory::diacritics);
    if (translation.find("كاميرا") != std::string_view::npos) cats.insert(ErrorCategory::loanword);
    if (translation.find("باللغة العربية") != std::string_view::npos) cats.insert(ErrorCategory::hallucination);
    switch ((h >> 8) % 25) {
        case 0: case 1: cats.insert(ErrorCategory::tense_shift); break;
        case 2: cats.insert(ErrorCategory::lexical); break;
        case 3: cats.insert(ErrorCategory::literal); break;
        default: break;
    }
    if (cats.empty()) return "FLAGS: none";
    std::string out = "FLAGS: ";
    bool first = true;
    for (const auto& t : cats.tokens()) {
        if (!first) out += ",";
        out += t;
        first = false;
    }
    return out;
}

CompletionResponse MockBackend::send(const CompletionRequest& request) {
    ++calls_;
    InFlightGuard guard(in_flight_, max_in_flight_);
    if (latency_.count() > 0) std::this_thread::sleep_for(latency_);

    const std::string& prompt = request.prompt;
    {
        std::lock_guard lock(mu_);
        for (const auto& needle : permanent_) {
            if (prompt.find(needle) != std::string::npos) throw TransportError("mock: permanent failure");
        }
        for (auto& [needle, remaining] : transient_) {
            if (remaining > 0 && prompt.find(needle) != std::string::npos) {
                --remaining;
                throw TransientProviderError("mock: transient failure");
            }
        }
        if (auto it = table_.find(prompt); it != table_.end()) return {it->second, latency_, std::nullopt, false};
    }
    if (auto caption = caption_from_translation_prompt(prompt)) {
        return {pseudo_translate(*caption), latency_, std::nullopt, false};
    }
    if (auto texts = texts_from_judge_prompt(prompt)) {
        return {pseudo_judge(texts->first, texts->second), latency_, std::nullopt, false};
    }
    return {"mock:" + sha256_hex(prompt).substr(0, 16), latency_, std::nullopt, false};
}

// --- http ------------------------------------------------------------------

HttpBackend::HttpBackend(const ProviderConfig& config) {
    const char* key = std::getenv(config.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
        throw ConfigError("credential variable " + config.api_key_env + " is not set");
    }
    api_key_ = key;
    const auto scheme_end = config.base_url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("base_url must include a scheme: " + config.base_url);
    const auto path_begin = config.base_url.find('/', scheme_end + 3);
    scheme_host_ = config.base_url.substr(0, path_begin);
    path_prefix_ = path_begin == std::string::npos ? "" : config.base_url.substr(path_begin);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

CompletionResponse HttpBackend::send(const CompletionRequest& request) {
    using nlohmann::json;
    const auto& cfg = request.config;
    httplib::Client client(scheme_host_);
    const auto timeout = std::chrono::duration_cast<std::chrono::seconds>(cfg.request_timeout).count();
    client.set_connection_timeout(static_cast<time_t>(timeout));
    client.set_read_timeout(static_cast<time_t>(timeout));
    client.set_bearer_token_auth(api_key_);

    json body = {{"model", cfg.model_name},
                 {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
                 {"temperature", cfg.temperature},
                 {"top_p", cfg.top_p}};

    const auto started = std::chrono::steady_clock::now();
    auto res = client.Post(path_prefix_ + "/chat/completions", body.dump(), "application/json");
    const auto latency =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    if (!res) throw TransientProviderError("request failed: " + httplib::to_string(res.error()));
    if (res->status == 429 || res->status >= 500) {
        throw TransientProviderError("provider returned HTTP " + std::to_string(res->status));
    }
    if (res->status != 200) {
        throw TransportError("provider returned HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    CompletionResponse out;
    out.latency = latency;
    try {
        const json j = json::parse(res->body);
        out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
        if (j.contains("usage")) {
            out.usage = TokenUsage{j["usage"].value("prompt_tokens", 0), j["usage"].value("completion_tokens", 0)};
        }
    } catch (const json::exception& e) {
        throw TransportError(std::string("unexpected provider response: ") + e.what());
    }
    if (out.text.empty()) throw TransientProviderError("provider returned empty text");
    return out;
}

std::shared_ptr<CompletionBackend> make_backend(const ProviderConfig& config, std::uint64_t mock_seed) {
    config.validate();
    if (config.provider_name == "mock") return std::make_shared<MockBackend>(mock_seed);
    return std::make_shared<HttpBackend>(config);
}

}  // namespace autoarabic
