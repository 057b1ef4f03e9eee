#include "prefq/doc_model.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace prefq {

namespace {

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
}

bool is_name_char(char c) {
  return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) ||
         c == '-' || c == '.';
}

struct Cursor {
  std::string_view text;
  size_t pos = 0;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  bool starts_with(std::string_view s) const {
    return text.substr(pos, s.size()) == s;
  }
  void skip_ws() {
    while (!done() && std::isspace(static_cast<unsigned char>(peek()))) ++pos;
  }
};

void skip_until(Cursor& c, std::string_view terminator, const char* what) {
  size_t hit = c.text.find(terminator, c.pos);
  if (hit == std::string_view::npos)
    throw DocError(std::string("unterminated ") + what, c.pos);
  c.pos = hit + terminator.size();
}

void check_entity(Cursor& c) {
  size_t amp = c.pos;
  size_t semi = c.text.find(';', amp);
  if (semi == std::string_view::npos || semi - amp > 10)
    throw DocError("unterminated entity reference", amp);
  std::string_view name = c.text.substr(amp + 1, semi - amp - 1);
  bool ok = name == "amp" || name == "lt" || name == "gt" || name == "apos" ||
            name == "quot" ||
            (!name.empty() && name[0] == '#');
  if (!ok)
    throw DocError("unsupported entity reference '&" + std::string(name) + ";'", amp);
  c.pos = semi + 1;
}

std::string read_name(Cursor& c) {
  size_t begin = c.pos;
  if (c.done() || !is_name_start(c.peek()))
    throw DocError("expected element name", c.pos);
  while (!c.done() && is_name_char(c.peek())) ++c.pos;
  return std::string(c.text.substr(begin, c.pos - begin));
}

// Consumes attributes up to (but not including) '>' or '/>'.
void skip_attributes(Cursor& c) {
  for (;;) {
    c.skip_ws();
    if (c.done()) throw DocError("unterminated start tag", c.pos);
    char ch = c.peek();
    if (ch == '>' || ch == '/') return;
    if (!is_name_start(ch)) throw DocError("expected attribute name", c.pos);
    while (!c.done() && is_name_char(c.peek())) ++c.pos;
    c.skip_ws();
    if (c.done() || c.peek() != '=')
      throw DocError("expected '=' after attribute name", c.pos);
    ++c.pos;
    c.skip_ws();
    if (c.done() || (c.peek() != '"' && c.peek() != '\''))
      throw DocError("expected quoted attribute value", c.pos);
    char quote = c.peek();
    ++c.pos;
    size_t end = c.text.find(quote, c.pos);
    if (end == std::string_view::npos)
      throw DocError("unterminated attribute value", c.pos);
    c.pos = end + 1;
  }
}

}  // namespace

DocTree parse_document(std::string_view xml) {
  Cursor c{xml};
  DocTree doc;
  std::vector<int> open;  // stack of node indices
  uint32_t counter = 0;
  bool root_closed = false;

  for (;;) {
    c.skip_ws();
    if (c.done()) break;

    if (c.peek() != '<') {
      if (open.empty())
        throw DocError("text content outside the root element", c.pos);
      if (c.peek() == '&') {
        check_entity(c);
      } else {
        ++c.pos;
      }
      continue;
    }

    if (c.starts_with("<!--")) {
      c.pos += 4;
      skip_until(c, "-->", "comment");
      continue;
    }
    if (c.starts_with("<![CDATA[")) {
      if (open.empty()) throw DocError("CDATA outside the root element", c.pos);
      c.pos += 9;
      skip_until(c, "]]>", "CDATA section");
      continue;
    }
    if (c.starts_with("<!DOCTYPE") || c.starts_with("<!doctype"))
      throw DocError("DOCTYPE declarations are not supported", c.pos);
    if (c.starts_with("<?")) {
      c.pos += 2;
      skip_until(c, "?>", "processing instruction");
      continue;
    }

    if (c.starts_with("</")) {
      size_t tag_pos = c.pos;
      c.pos += 2;
      std::string name = read_name(c);
      c.skip_ws();
      if (c.done() || c.peek() != '>')
        throw DocError("malformed close tag", c.pos);
      ++c.pos;
      if (open.empty())
        throw DocError("close tag </" + name + "> with no open element", tag_pos);
      DocTree::Node& node = doc.nodes[open.back()];
      if (node.label != name)
        throw DocError("close tag </" + name + "> does not match open tag <" +
                           node.label + ">",
                       tag_pos);
      node.region.end = ++counter;
      open.pop_back();
      if (open.empty()) root_closed = true;
      continue;
    }

    // start tag
    size_t tag_pos = c.pos;
    ++c.pos;
    if (root_closed)
      throw DocError("content after the root element", tag_pos);
    std::string name = read_name(c);
    skip_attributes(c);
    bool self_closing = false;
    if (c.peek() == '/') {
      ++c.pos;
      if (c.done() || c.peek() != '>')
        throw DocError("malformed empty-element tag", c.pos);
      self_closing = true;
    }
    ++c.pos;  // '>'

    DocTree::Node node;
    node.label = std::move(name);
    node.region.start = ++counter;
    node.region.level = static_cast<uint32_t>(open.size()) + 1;
    node.parent = open.empty() ? -1 : open.back();
    int index = static_cast<int>(doc.nodes.size());
    if (node.parent >= 0) doc.nodes[node.parent].children.push_back(index);
    doc.nodes.push_back(std::move(node));
    if (self_closing) {
      doc.nodes[index].region.end = ++counter;
      if (open.empty()) root_closed = true;
    } else {
      open.push_back(index);
    }
  }

  if (!open.empty())
    throw DocError("unclosed element <" + doc.nodes[open.back()].label + ">",
                   xml.size());
  if (doc.nodes.empty()) throw DocError("no root element", 0);
  return doc;
}

DocTree load_document_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DocError("cannot open document file: " + path, 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_document(buf.str());
}

}  // namespace prefq
