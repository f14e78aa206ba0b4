#include "topiclabel/sentence.hpp"

namespace topiclabel {

TopicSentence build_sentence(const Topic& topic) {
  const auto& words = topic.words();
  std::size_t length = 2 * (words.size() - 1);
  for (const auto& w : words) length += w.size();

  TopicSentence sentence;
  sentence.text.reserve(length);
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) sentence.text += ", ";
    sentence.text += words[i];
  }
  return sentence;
}

}  // namespace topiclabel
