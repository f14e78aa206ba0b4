#pragma once

#include <string>

#include "topiclabel/core.hpp"

namespace topiclabel {

struct TopicSentence {
  std::string text;
};

// Joins the topic words with ", " in order.
TopicSentence build_sentence(const Topic& topic);

}  // namespace topiclabel
