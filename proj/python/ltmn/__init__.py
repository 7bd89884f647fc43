from ._ltmn import (
    ContractError,
    Error,
    FormatError,
    Model,
    NumericError,
    ParseError,
    bleu,
    cli,
    count_questions,
    exact_match,
    generate_task,
    gradcheck,
    partial_match,
    replacement_table,
    task_name,
    to_multiword,
    tokenize,
    tokenize_answer,
)

__all__ = [
    "ContractError",
    "Error",
    "FormatError",
    "Model",
    "NumericError",
    "ParseError",
    "bleu",
    "cli",
    "count_questions",
    "exact_match",
    "generate_task",
    "gradcheck",
    "partial_match",
    "replacement_table",
    "task_name",
    "to_multiword",
    "tokenize",
    "tokenize_answer",
]
