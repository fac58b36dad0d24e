"""mtsumm: a workbench for query-focused multi-table summarization.

Builds datasets from relational databases via SQL execution, generates
summaries with prompting strategies against chat-completion endpoints, and
scores outputs with lexical and table-grounded metrics.
"""

__version__ = "0.1.0"
