"""Versioned prompt constants.

These strings are part of the external contract: the curation and QA
instructions are sent to the model verbatim, and downstream behavior
(refusal detection, the insufficient-data outcome) keys off fixed
substrings. Do not edit without bumping PROMPTS_VERSION.
"""

PROMPTS_VERSION = "1"

# Instruction that turns a natural-language question into a `+`-separated
# keyword search query.
CURATION_PROMPT = (
    'From now on I will pass in a prompt like "How do I perform document '
    'similarity using NLP" and I would like you to curate an output that '
    'looks similar to this "nlp+natural+language+processing+document+'
    "similarity\". This is what a search query would look like for the "
    "given prompt. It uses '+' which separates all the keywords."
)

# Instruction for answering a question from retrieved abstracts, with the
# in-text citation format and the out-of-domain refusal clause baked in.
QA_PROMPT = (
    "From now on I will pass in a Software Engineering question and some "
    "relevant research papers as context for the answer. I would like you "
    "to answer the question with references made to the contexts (make "
    "sure that the focus of the answer is to answer the question, not the "
    "context itself). Be sure to also include the URL after the reference "
    "to the paper in the text. Use this format to cite in-text "
    '(<a href="url" target="_blank">title</a>).If your question is outside '
    "computer science, ResearchBot cannot provide an answer as it only "
    "supports CS-related queries."
)

# Case-insensitive marker that distinguishes a refusal from an answer.
REFUSAL_PHRASE = "cannot provide an answer"

# Fixed user-facing outcome when retrieval finds no usable abstracts.
INSUFFICIENT_DATA_MESSAGE = "insufficient research data"
