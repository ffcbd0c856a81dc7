#pragma once

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "latmatch/index_io.hpp"
#include "latmatch/io.hpp"
#include "latmatch/learn.hpp"
#include "latmatch/render.hpp"

namespace latmatch {

// Exit codes: 0 success, 1 input/validation error, 2 infeasible or
// inconsistent, 3 resource cap exceeded.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitCap = 3;

namespace detail_cli {

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        auto tok = detail::split_ws(cur);
        cur.clear();
        if (tok.size() == 1) out.push_back(tok[0]);
        else if (tok.size() > 1) throw ValidationError("malformed list item in '" + s + "'");
    };
    for (char c : s) {
        if (c == ',')
            flush();
        else
            cur.push_back(c);
    }
    flush();
    if (out.empty()) throw ValidationError("empty list '" + s + "'");
    return out;
}

struct KbContext {
    Lattice lattice;
    std::optional<Weighting> weights;
};

inline KbContext load_kb_context(const std::string& kb_path, const std::string& weights_path,
                                 bool normalize) {
    KbContext ctx{build_lattice(parse_knowledge_base(read_file(kb_path))), std::nullopt};
    if (!weights_path.empty())
        ctx.weights = load_weights(read_file(weights_path), ctx.lattice, normalize);
    return ctx;
}

inline void print_topk(std::ostream& out, OutputMode mode, const TopKResult& res) {
    if (mode == OutputMode::Machine) {
        machine_record(out, "topk.meta",
                       {{"lambda", std::to_string(res.lambda)},
                        {"threshold", to_string(res.threshold)},
                        {"virtual", res.virtual_column ? "1" : "0"}});
        for (const auto& [id, fit] : res.entries)
            machine_record(out, "topk.entry", {{"profile", id}, {"fitness", to_string(fit)}});
        return;
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& [id, fit] : res.entries) rows.push_back({id, to_string(fit)});
    render_table(out, {"profile", "fitness"}, rows);
    out << "lambda = " << res.lambda << "\n";
    out << "threshold = " << to_string(res.threshold) << "\n";
    if (res.virtual_column) out << "note: required filter served by a virtual column\n";
}

inline std::string concept_set_names(const Lattice& lat, const ConceptSet& s,
                                     const std::string& sep) {
    std::vector<std::string> names;
    s.for_each([&](std::size_t c) { names.push_back(lat.name(static_cast<ConceptId>(c))); });
    std::sort(names.begin(), names.end());
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += sep;
        out += names[i];
    }
    return out;
}

}  // namespace detail_cli

// Runs the command line given in `args` (without the program name).
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"lattice/filter profile matching toolkit"};
    app.require_subcommand(1);
    std::string format = "table";
    app.add_option("--format", format, "output mode: table or machine")
        ->check(CLI::IsMember({"table", "machine"}));

    std::string kb_path, weights_path, profiles_path, index_path, out_path, matrix_path,
        graph_path;
    bool normalize = false;

    // validate
    auto* c_validate = app.add_subcommand("validate", "parse and validate inputs");
    c_validate->add_option("--kb", kb_path, "knowledge base file")->required();
    c_validate->add_option("--weights", weights_path, "weights file");
    c_validate->add_option("--profiles", profiles_path, "profiles file");
    c_validate->add_flag("--normalize", normalize, "rescale weights that do not sum to 1");

    // match
    std::string given_label, requested_label;
    auto* c_match = app.add_subcommand("match", "matching value between two filters");
    c_match->add_option("--kb", kb_path)->required();
    c_match->add_option("--weights", weights_path)->required();
    c_match->add_flag("--normalize", normalize);
    c_match->add_option("--given", given_label, "given filter, e.g. \"<C2|C4>\"")->required();
    c_match->add_option("--requested", requested_label, "requested filter")->required();

    // topk
    std::size_t k = 0, ell = 0;
    std::string floor_text = "0";
    auto* c_topk = app.add_subcommand("topk", "top-k profiles for a required filter");
    c_topk->add_option("--index", index_path, "index directory");
    c_topk->add_option("--kb", kb_path);
    c_topk->add_option("--weights", weights_path);
    c_topk->add_option("--profiles", profiles_path);
    c_topk->add_flag("--normalize", normalize);
    c_topk->add_option("--required", requested_label, "required filter")->required();
    c_topk->add_option("--k", k, "result count")->required();
    c_topk->add_option("--floor", floor_text, "matching value floor (0 disables)");

    // gap
    std::string profile_id, assert_list;
    std::size_t gap_cap = 100000;
    auto* c_gap = app.add_subcommand("gap", "minimal profile extensions improving rankings");
    c_gap->add_option("--index", index_path);
    c_gap->add_option("--kb", kb_path);
    c_gap->add_option("--weights", weights_path);
    c_gap->add_option("--profiles", profiles_path);
    c_gap->add_flag("--normalize", normalize);
    c_gap->add_option("--id", profile_id, "profile id")->required();
    c_gap->add_option("--assert", assert_list,
                      "asserted concepts, comma separated (defaults to the stored profile)");
    c_gap->add_option("--k", k)->required();
    c_gap->add_option("--ell", ell)->required();
    c_gap->add_option("--cap", gap_cap, "selection enumeration cap");

    // learn
    std::string eps_text, out_weights;
    std::size_t fm_cap = 200000;
    auto* c_learn = app.add_subcommand("learn", "learn a weighting from expert matchings");
    c_learn->add_option("--kb", kb_path)->required();
    c_learn->add_option("--matrix", matrix_path, "expert matrix csv")->required();
    c_learn->add_option("--epsilon", eps_text, "margin override (default 1/1024)");
    c_learn->add_option("--fm-cap", fm_cap, "intermediate inequality cap");
    c_learn->add_option("--out-weights", out_weights, "write the learned weights here");

    // fuzzy
    std::string extend_list;
    auto* c_fuzzy = app.add_subcommand("fuzzy", "fuzzy extension and matching on a graph");
    c_fuzzy->add_option("--graph", graph_path)->required();
    c_fuzzy->add_option("--extend", extend_list, "only extend this property set");
    c_fuzzy->add_option("--given", given_label, "given property set, comma separated");
    c_fuzzy->add_option("--requested", requested_label, "requested property set");

    // entropy
    std::string mode_text = "lower";
    bool dump_model = false, dump_sentences = false;
    auto* c_entropy = app.add_subcommand("entropy", "maximum entropy probabilistic matching");
    c_entropy->add_option("--graph", graph_path)->required();
    c_entropy->add_option("--mode", mode_text, "lower or strict")
        ->check(CLI::IsMember({"lower", "strict"}));
    c_entropy->add_option("--given", given_label)->required();
    c_entropy->add_option("--requested", requested_label)->required();
    c_entropy->add_flag("--dump-model", dump_model, "print the full probability model");
    c_entropy->add_flag("--dump-sentences", dump_sentences, "print the derived sentences");

    // index build|save|load
    auto* c_index = app.add_subcommand("index", "build, re-save or inspect an index");
    c_index->require_subcommand(1);
    auto* c_ibuild = c_index->add_subcommand("build", "build an index and persist it");
    c_ibuild->add_option("--kb", kb_path)->required();
    c_ibuild->add_option("--weights", weights_path)->required();
    c_ibuild->add_flag("--normalize", normalize);
    c_ibuild->add_option("--profiles", profiles_path)->required();
    c_ibuild->add_option("--out", out_path)->required();
    auto* c_isave = c_index->add_subcommand("save", "load an index and save it elsewhere");
    c_isave->add_option("--index", index_path)->required();
    c_isave->add_option("--out", out_path)->required();
    auto* c_iload = c_index->add_subcommand("load", "load an index and print a summary");
    c_iload->add_option("--index", index_path)->required();

    std::vector<std::string> argv_s = args;
    std::vector<const char*> argv;
    argv.push_back("latmatch");
    for (const auto& a : argv_s) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
    OutputMode mode = format == "machine" ? OutputMode::Machine : OutputMode::Table;

    try {
        if (*c_validate) {
            auto ctx =
                detail_cli::load_kb_context(kb_path, weights_path, normalize);
            std::size_t n_profiles = 0;
            if (!profiles_path.empty())
                n_profiles = parse_profiles(read_file(profiles_path), ctx.lattice).size();
            if (mode == OutputMode::Machine) {
                machine_record(out, "validate.ok",
                               {{"concepts", std::to_string(ctx.lattice.size())},
                                {"weights", ctx.weights ? "1" : "0"},
                                {"profiles", std::to_string(n_profiles)}});
            } else {
                out << "ok: " << ctx.lattice.size() << " concepts (top "
                    << ctx.lattice.name(ctx.lattice.top()) << ", bottom "
                    << ctx.lattice.name(ctx.lattice.bottom()) << ")\n";
                if (ctx.weights) out << "ok: weights valid\n";
                if (!profiles_path.empty()) out << "ok: " << n_profiles << " profiles\n";
            }
            return kExitOk;
        }

        if (*c_match) {
            auto ctx = detail_cli::load_kb_context(kb_path, weights_path, normalize);
            Filter g = parse_filter(ctx.lattice, given_label);
            Filter r = parse_filter(ctx.lattice, requested_label);
            Rat mu = match_value(*ctx.weights, g, r);
            Rat mu_inv = match_value(*ctx.weights, r, g);
            if (mode == OutputMode::Machine)
                machine_record(out, "match.value",
                               {{"mu", to_string(mu)}, {"mu_inverse", to_string(mu_inv)}});
            else
                render_table(out, {"measure", "value"},
                             {{"mu", to_string(mu)}, {"mu_inverse", to_string(mu_inv)}});
            return kExitOk;
        }

        if (*c_topk || *c_gap) {
            std::optional<MatchIndex> index;
            if (!index_path.empty()) {
                index = load_index(index_path);
            } else {
                if (kb_path.empty() || weights_path.empty() || profiles_path.empty())
                    throw ValidationError("need --index or all of --kb/--weights/--profiles");
                auto lat = std::make_shared<const Lattice>(
                    build_lattice(parse_knowledge_base(read_file(kb_path))));
                Weighting w = load_weights(read_file(weights_path), *lat, normalize);
                auto profiles = parse_profiles(read_file(profiles_path), *lat);
                index = build_index(*lat, w, profiles);
                index->adopt_lattice(lat);
            }
            const Lattice& lattice = index->lattice();
            if (*c_topk) {
                Filter required = parse_filter(lattice, requested_label);
                TopKResult res = topk(*index, required, k, parse_rational(floor_text));
                detail_cli::print_topk(out, mode, res);
                return kExitOk;
            }
            Profile p;
            p.id = profile_id;
            if (!assert_list.empty()) {
                for (const auto& name : detail_cli::split_list(assert_list))
                    p.asserted.push_back(lattice.id_of(name));
            } else {
                bool found = false;
                for (const auto& ip : index->profiles())
                    if (ip.id == profile_id) {
                        const Filter& f =
                            index->filters()[static_cast<std::size_t>(ip.filter)];
                        for (ConceptId gconcept : filter_generators(lattice, f))
                            p.asserted.push_back(gconcept);
                        found = true;
                        break;
                    }
                if (!found)
                    throw ValidationError("profile '" + profile_id +
                                          "' not in the index; pass --assert");
            }
            GapResult res = gap_query(*index, p, k, ell, gap_cap);
            if (mode == OutputMode::Machine) {
                machine_record(out, "gap.meta",
                               {{"candidates", std::to_string(res.candidates.size())},
                                {"truncated", res.truncated ? "1" : "0"}});
                for (const auto& c : res.candidates) {
                    std::string supp;
                    for (std::size_t i = 0; i < c.supporting.size(); ++i)
                        supp += (i ? "|" : "") + c.supporting[i];
                    machine_record(
                        out, "gap.candidate",
                        {{"extension", detail_cli::concept_set_names(lattice, c.extension, "|")},
                         {"supports", supp}});
                }
            } else {
                std::vector<std::vector<std::string>> rows;
                for (const auto& c : res.candidates) {
                    std::string ext = detail_cli::concept_set_names(lattice, c.extension, ", ");
                    std::string supp;
                    for (std::size_t i = 0; i < c.supporting.size(); ++i)
                        supp += (i ? ", " : "") + c.supporting[i];
                    rows.push_back({ext.empty() ? "{}" : "{" + ext + "}", supp});
                }
                render_table(out, {"extension", "supports"}, rows);
                if (res.truncated) out << "note: selection cap hit, result may be partial\n";
            }
            return res.truncated ? kExitCap : kExitOk;
        }

        if (*c_learn) {
            Lattice lattice = build_lattice(parse_knowledge_base(read_file(kb_path)));
            ExpertMatrix h = load_expert_matrix(read_file(matrix_path), lattice);
            Rat eps = eps_text.empty() ? kDefaultMargin : parse_rational(eps_text);
            LearnResult res = learn_weights(h, lattice, eps, fm_cap);
            if (!res.plausibility.empty()) {
                for (const auto& v : res.plausibility.violations) {
                    if (mode == OutputMode::Machine)
                        machine_record(out, "learn.violation",
                                       {{"constraint", std::to_string(v.constraint)},
                                        {"detail", v.detail}});
                    else
                        out << "violation of constraint (" << v.constraint << "): " << v.detail
                            << "\n";
                }
                if (res.plausibility.truncated) out << "note: violation list truncated\n";
                return kExitInput;
            }
            if (!res.realisability.realisable) {
                if (mode == OutputMode::Machine) {
                    for (std::size_t i = 0; i < res.system.items.size(); ++i)
                        machine_record(out, "learn.certificate",
                                       {{"multiplier",
                                         std::to_string(res.realisability.certificate[i])},
                                        {"inequality",
                                         render_inequality(res.system.items[i], &lattice)}});
                } else {
                    out << "system is not realisable; certificate:\n";
                    std::vector<std::vector<std::string>> rows;
                    for (std::size_t i = 0; i < res.system.items.size(); ++i)
                        rows.push_back({std::to_string(res.realisability.certificate[i]),
                                        render_inequality(res.system.items[i], &lattice)});
                    render_table(out, {"multiplier", "inequality"}, rows);
                }
                return kExitInfeasible;
            }
            if (mode == OutputMode::Machine) {
                machine_record(out, "learn.meta",
                               {{"inequalities", std::to_string(res.system.items.size())},
                                {"fm_capped", res.fm_capped ? "1" : "0"},
                                {"ranking_failures", std::to_string(res.ranking.failures.size())}});
                for (std::size_t i = 0; i < lattice.size(); ++i)
                    machine_record(out, "learn.weight",
                                   {{"concept", lattice.name(static_cast<ConceptId>(i))},
                                    {"value",
                                     to_string(res.weights->of(static_cast<ConceptId>(i)))}});
            } else {
                out << "realisable: " << res.system.items.size() << " inequalities"
                    << (res.fm_capped ? " (elimination capped, LP decided)" : "") << "\n";
                std::vector<std::vector<std::string>> rows;
                for (std::size_t i = 0; i < lattice.size(); ++i)
                    rows.push_back({lattice.name(static_cast<ConceptId>(i)),
                                    to_string(res.weights->of(static_cast<ConceptId>(i)))});
                render_table(out, {"concept", "weight"}, rows);
            }
            if (!out_weights.empty())
                write_file(out_weights, serialize_weights(lattice, *res.weights));
            if (!res.ranking.empty()) {
                for (const auto& f : res.ranking.failures)
                    err << "ranking failure (" << f.condition << "): " << f.detail << "\n";
                return kExitInput;
            }
            return kExitOk;
        }

        if (*c_fuzzy) {
            EnrichedGraph g = parse_graph(read_file(graph_path));
            std::vector<double> unit(g.size(), 1.0);
            auto print_fuzzy = [&](const std::string& tag, const FuzzySet& f) {
                std::vector<std::vector<std::string>> rows;
                for (const auto& [node, grade] : f.membership)
                    rows.push_back({g.name(node), fixed9(grade)});
                std::sort(rows.begin(), rows.end());
                if (mode == OutputMode::Machine)
                    for (const auto& r : rows)
                        machine_record(out, tag + ".member", {{"node", r[0]}, {"grade", r[1]}});
                else {
                    out << tag << ":\n";
                    render_table(out, {"node", "grade"}, rows);
                }
            };
            if (!extend_list.empty()) {
                print_fuzzy("extension", extend_profile(g, detail_cli::split_list(extend_list)));
                return kExitOk;
            }
            if (given_label.empty() || requested_label.empty())
                throw ValidationError("need --extend or both --given and --requested");
            FuzzySet fg = extend_profile(g, detail_cli::split_list(given_label));
            FuzzySet fr = extend_profile(g, detail_cli::split_list(requested_label));
            print_fuzzy("given", fg);
            print_fuzzy("requested", fr);
            double inter = fuzzy_weight(unit, fuzzy_intersect(fg, fr));
            double mu = fuzzy_match(unit, fg, fr);
            double mu_inv = fuzzy_match(unit, fr, fg);
            if (mode == OutputMode::Machine)
                machine_record(out, "fuzzy.match",
                               {{"intersection_weight", fixed9(inter)},
                                {"mu", fixed9(mu)},
                                {"mu_inverse", fixed9(mu_inv)}});
            else {
                out << "intersection weight = " << fixed9(inter) << "\n";
                out << "mu = " << fixed9(mu) << "\n";
                out << "mu_inverse = " << fixed9(mu_inv) << "\n";
            }
            return kExitOk;
        }

        if (*c_entropy) {
            EnrichedGraph g = parse_graph(read_file(graph_path));
            SentenceMode smode =
                mode_text == "strict" ? SentenceMode::Strict : SentenceMode::LowerBound;
            auto given = detail_cli::split_list(given_label);
            auto requested = detail_cli::split_list(requested_label);
            ProbMatchResult res = prob_match(g, given, requested, smode);
            if (dump_sentences) {
                for (const auto& s : res.db.sentences) {
                    auto atom_name = [&](const Event& e) {
                        for (std::size_t i = 0; i < res.db.atom_names.size(); ++i)
                            if (e.pos == (std::uint32_t(1) << i)) return res.db.atom_names[i];
                        return std::string("?");
                    };
                    if (mode == OutputMode::Machine)
                        machine_record(out, "entropy.sentence",
                                       {{"condition", atom_name(s.condition)},
                                        {"consequence", atom_name(s.consequence)},
                                        {"lower", fixed9(s.lower)},
                                        {"upper", fixed9(s.upper)}});
                    else
                        out << "P(" << atom_name(s.consequence) << " | " << atom_name(s.condition)
                            << ") in [" << fixed9(s.lower) << ", " << fixed9(s.upper) << "]\n";
                }
            }
            if (res.result.inconsistent) {
                if (mode == OutputMode::Machine)
                    machine_record(out, "entropy.result", {{"inconsistent", "1"}});
                else
                    out << "result: inconsistent\n";
                return kExitInfeasible;
            }
            if (dump_model) {
                auto probs = format_probability_vector(res.model.p);
                for (std::uint32_t w = 0; w < res.model.p.size(); ++w) {
                    if (mode == OutputMode::Machine)
                        machine_record(out, "entropy.world",
                                       {{"world", world_label(res.model.atoms, w)},
                                        {"p", probs[w]}});
                    else
                        out << world_label(res.model.atoms, w) << "\t" << probs[w] << "\n";
                }
            }
            if (mode == OutputMode::Machine)
                machine_record(out, "entropy.result", {{"probability", fixed9(res.result.value)}});
            else
                out << "probability = " << fixed9(res.result.value) << "\n";
            return kExitOk;
        }

        if (*c_ibuild) {
            auto lat = std::make_shared<const Lattice>(
                build_lattice(parse_knowledge_base(read_file(kb_path))));
            Weighting w = load_weights(read_file(weights_path), *lat, normalize);
            auto profiles = parse_profiles(read_file(profiles_path), *lat);
            MatchIndex idx = build_index(*lat, w, profiles);
            save_index(idx, out_path);
            if (mode == OutputMode::Machine)
                machine_record(out, "index.saved",
                               {{"path", out_path},
                                {"filters", std::to_string(idx.filters().size())},
                                {"profiles", std::to_string(idx.profiles().size())}});
            else
                out << "index written to " << out_path << " (" << idx.filters().size()
                    << " filters, " << idx.profiles().size() << " profiles)\n";
            return kExitOk;
        }
        if (*c_isave) {
            MatchIndex idx = load_index(index_path);
            save_index(idx, out_path);
            out << "index re-saved to " << out_path << "\n";
            return kExitOk;
        }
        if (*c_iload) {
            MatchIndex idx = load_index(index_path);
            std::size_t records = 0;
            for (const auto& col : idx.columns()) records += col.size();
            if (mode == OutputMode::Machine)
                machine_record(out, "index.ok",
                               {{"filters", std::to_string(idx.filters().size())},
                                {"profiles", std::to_string(idx.profiles().size())},
                                {"records", std::to_string(records)}});
            else
                out << "ok: " << idx.filters().size() << " filters, " << idx.profiles().size()
                    << " profiles, " << records << " records\n";
            return kExitOk;
        }
        err << "error: no subcommand\n";
        return kExitInput;
    } catch (const InfeasibleSystem& e) {
        err << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const InconsistentInput& e) {
        err << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const CapExceeded& e) {
        err << "error: " << e.what() << "\n";
        return kExitCap;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
}

}  // namespace latmatch
