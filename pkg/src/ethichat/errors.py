"""Exception hierarchy shared across the package."""


class EthichatError(Exception):
    """Base class for all domain errors."""


class ParseError(EthichatError):
    def __init__(self, line, col, expected):
        self.line = line
        self.col = col
        self.expected = expected
        super().__init__(f"line {line}, col {col}: expected {expected}")


class SafetyError(EthichatError):
    def __init__(self, rule_index, variable):
        self.rule_index = rule_index
        self.variable = variable
        super().__init__(
            f"rule {rule_index}: variable {variable} not bound by a positive body literal"
        )


class ArityError(EthichatError):
    def __init__(self, predicate, arities):
        self.predicate = predicate
        self.arities = sorted(arities)
        super().__init__(f"predicate {predicate} used with arities {self.arities}")


class DepthError(EthichatError):
    def __init__(self, term_text, depth):
        self.term_text = term_text
        super().__init__(f"term {term_text} exceeds nesting depth {depth}")


class CapacityError(EthichatError):
    pass


class NotDerived(EthichatError):
    pass


class InconsistentVerdict(EthichatError):
    def __init__(self, subject):
        self.subject = subject
        super().__init__(f"model derives both ethical and unethical for {subject}")


class UnmappableToken(EthichatError):
    pass


class NoHeadMode(EthichatError):
    def __init__(self, predicate):
        self.predicate = predicate
        super().__init__(f"no head mode declared for predicate {predicate}")


class NoConsistentRule(EthichatError):
    def __init__(self, example):
        self.example = example
        super().__init__(f"no bottom-clause subset separates example {example}")


class NoConsistentRevision(EthichatError):
    pass


class UnknownCase(EthichatError):
    def __init__(self, case_id):
        self.case_id = case_id
        super().__init__(f"case {case_id} is not pending a label")


class RoutingError(EthichatError):
    pass


class ConfigError(EthichatError):
    pass


class PipelineTimeout(EthichatError):
    pass
