#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "docrebench/cli.hpp"
#include "docrebench/errors.hpp"
#include "docrebench/geometry.hpp"
#include "docrebench/matching.hpp"
#include "docrebench/metrics.hpp"
#include "docrebench/model.hpp"
#include "docrebench/pipeline.hpp"
#include "docrebench/reconstruct.hpp"
#include "docrebench/synth.hpp"
#include "docrebench/unicode.hpp"

namespace py = pybind11;
using namespace docrebench;

namespace {

Polygon polygon_from_flat(const std::vector<double>& flat) {
    if (flat.size() % 2 != 0) throw GeometryError("flat coordinate list has odd length");
    std::vector<Point> pts;
    pts.reserve(flat.size() / 2);
    for (std::size_t i = 0; i + 1 < flat.size(); i += 2) pts.push_back({flat[i], flat[i + 1]});
    return Polygon(std::move(pts));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Document OCR evaluation, reconstruction and synthesis toolkit";
    m.attr("__version__") = kToolVersion;

    py::register_exception<Error>(m, "DocrebenchError");

    // geometry
    m.def(
        "polygon_area",
        [](const std::vector<double>& flat) { return polygon_area(polygon_from_flat(flat)); },
        py::arg("polygon"), "Absolute area of a flat [x0, y0, x1, y1, ...] polygon");
    m.def(
        "polygon_iou",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            return polygon_iou(polygon_from_flat(a), polygon_from_flat(b));
        },
        py::arg("a"), py::arg("b"), "Intersection over union of two flat polygons");
    m.def(
        "bbox_of",
        [](const std::vector<double>& flat) {
            BBox b = bbox_of(polygon_from_flat(flat));
            return py::make_tuple(b.x_min, b.y_min, b.x_max, b.y_max);
        },
        py::arg("polygon"));

    // text metrics
    m.def("nfc", [](const std::string& s) { return nfc(s); }, py::arg("text"),
          "Canonical composition (NFC) of a UTF-8 string");
    m.def("edit_distance",
          [](const std::string& a, const std::string& b) {
              return edit_distance_utf8(a, b);
          },
          py::arg("a"), py::arg("b"), "Levenshtein distance over Unicode scalar values");
    m.def("cer", [](const std::string& g, const std::string& p) { return cer(g, p); },
          py::arg("gt"), py::arg("pred"));
    m.def("wer", [](const std::string& g, const std::string& p) { return wer(g, p); },
          py::arg("gt"), py::arg("pred"));
    m.def("f_measure", &f_measure, py::arg("precision"), py::arg("recall"));

    // model
    py::class_<DocumentAnnotation>(m, "Document")
        .def_property_readonly("image_id",
                               [](const DocumentAnnotation& d) { return d.image_id; })
        .def_property_readonly("domain", [](const DocumentAnnotation& d) { return d.domain; })
        .def_property_readonly("width", [](const DocumentAnnotation& d) { return d.width; })
        .def_property_readonly("height", [](const DocumentAnnotation& d) { return d.height; })
        .def_property_readonly("n_regions",
                               [](const DocumentAnnotation& d) { return d.regions.size(); })
        .def_property_readonly("n_lines",
                               [](const DocumentAnnotation& d) { return d.lines.size(); })
        .def_property_readonly("n_words",
                               [](const DocumentAnnotation& d) { return d.words.size(); })
        .def("to_json", &document_to_json)
        .def("region_text",
             [](const DocumentAnnotation& d, const std::string& region_id) {
                 return region_text(d, region_id);
             },
             py::arg("region_id"))
        .def("__repr__", [](const DocumentAnnotation& d) {
            return "<Document " + d.image_id + ": " + std::to_string(d.regions.size()) +
                   " regions, " + std::to_string(d.words.size()) + " words>";
        });

    m.def("load_document",
          [](const std::filesystem::path& p) { return load_document(p); }, py::arg("path"));
    m.def("save_document", &save_document, py::arg("doc"), py::arg("path"));
    m.def(
        "validate_document",
        [](const DocumentAnnotation& doc) {
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& v : validate_document(doc)) out.emplace_back(v.id, v.rule);
            return out;
        },
        py::arg("doc"), "List of (element id, violated rule); empty when valid");

    // scores
    py::class_<WordLevelScore>(m, "WordLevelScore")
        .def_readonly("tp", &WordLevelScore::tp)
        .def_readonly("fp", &WordLevelScore::fp)
        .def_readonly("fn", &WordLevelScore::fn)
        .def_readonly("precision", &WordLevelScore::precision)
        .def_readonly("recall", &WordLevelScore::recall)
        .def_readonly("f", &WordLevelScore::f);
    py::class_<TextLevelScore>(m, "TextLevelScore")
        .def_readonly("cer", &TextLevelScore::cer)
        .def_readonly("wer", &TextLevelScore::wer)
        .def_readonly("char_weight", &TextLevelScore::char_weight)
        .def_readonly("word_weight", &TextLevelScore::word_weight);
    py::class_<DocumentScore>(m, "DocumentScore")
        .def_readonly("image_id", &DocumentScore::image_id)
        .def_readonly("domain", &DocumentScore::domain)
        .def_readonly("word_level", &DocumentScore::word_level)
        .def_readonly("text_level", &DocumentScore::text_level);

    m.def("evaluate_pair",
          [](const DocumentAnnotation& gt, const DocumentAnnotation& pred) {
              return evaluate_pair(gt, pred);
          },
          py::arg("gt"), py::arg("pred"));
    m.def(
        "evaluate_files",
        [](const std::filesystem::path& gt, const std::filesystem::path& pred) {
            return evaluate_pair(load_document(gt), load_document(pred));
        },
        py::arg("gt_path"), py::arg("pred_path"));

    // reconstruction
    m.def("fit_font_size",
          [](const std::string& text, double w, double h) {
              return fit_font_size(text, BBox{0, 0, w, h});
          },
          py::arg("text"), py::arg("width"), py::arg("height"));
    m.def(
        "reconstruct_html",
        [](const DocumentAnnotation& doc, const std::filesystem::path& out_dir) {
            return emit_html(build_intermediate(doc), out_dir);
        },
        py::arg("doc"), py::arg("out_dir"),
        "Writes index.html and intermediate.json; returns the index.html path");

    // synthesis
    py::class_<SynthSpec>(m, "SynthSpec")
        .def(py::init<>())
        .def_readwrite("page_width", &SynthSpec::page_width)
        .def_readwrite("page_height", &SynthSpec::page_height)
        .def_readwrite("regions", &SynthSpec::regions)
        .def_readwrite("lines_per_region_min", &SynthSpec::lines_per_region_min)
        .def_readwrite("lines_per_region_max", &SynthSpec::lines_per_region_max)
        .def_readwrite("words_per_line_min", &SynthSpec::words_per_line_min)
        .def_readwrite("words_per_line_max", &SynthSpec::words_per_line_max)
        .def_readwrite("image_regions", &SynthSpec::image_regions)
        .def_readwrite("table_regions", &SynthSpec::table_regions)
        .def_readwrite("vocabulary", &SynthSpec::vocabulary)
        .def_readwrite("seed", &SynthSpec::seed)
        .def_readwrite("domain", &SynthSpec::domain)
        .def_readwrite("image_id", &SynthSpec::image_id);
    py::class_<PerturbationSpec>(m, "PerturbationSpec")
        .def(py::init<>())
        .def_readwrite("p_drop", &PerturbationSpec::p_drop)
        .def_readwrite("p_spurious", &PerturbationSpec::p_spurious)
        .def_readwrite("p_char_sub", &PerturbationSpec::p_char_sub)
        .def_readwrite("box_jitter", &PerturbationSpec::box_jitter)
        .def_readwrite("region_split_prob", &PerturbationSpec::region_split_prob)
        .def_readwrite("seed", &PerturbationSpec::seed);
    py::class_<ExpectedOutcome>(m, "ExpectedOutcome")
        .def_readonly("dropped", &ExpectedOutcome::dropped)
        .def_readonly("spurious", &ExpectedOutcome::spurious)
        .def_readonly("substituted", &ExpectedOutcome::substituted)
        .def_readonly("tp", &ExpectedOutcome::tp)
        .def_readonly("fp", &ExpectedOutcome::fp)
        .def_readonly("fn", &ExpectedOutcome::fn)
        .def_readonly("precision", &ExpectedOutcome::precision)
        .def_readonly("recall", &ExpectedOutcome::recall)
        .def_readonly("f", &ExpectedOutcome::f)
        .def_readonly("cer", &ExpectedOutcome::cer)
        .def_readonly("wer", &ExpectedOutcome::wer);

    m.def("generate_document", &generate_document, py::arg("spec"));
    m.def("perturb", &perturb, py::arg("gt"), py::arg("spec"));
    m.def("oracle_check", &oracle_check, py::arg("gt"), py::arg("pred"),
          py::arg("expected"), "Empty list means pipeline and bookkeeping agree");

    // orchestration helpers
    m.def(
        "batch_sizes",
        [](std::size_t n_items, std::size_t batch_size) {
            std::vector<std::size_t> items(n_items);
            std::vector<std::size_t> sizes;
            for (const auto& b : batch_items(items, batch_size)) sizes.push_back(b.size());
            return sizes;
        },
        py::arg("n_items"), py::arg("batch_size"));
}
