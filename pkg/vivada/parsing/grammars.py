from parsimonious.grammar import Grammar

# Saved wikitext of a "list of controversial issues" style page.
# Only level-2 headings and bulleted items matter; everything else is `other`.
SEED_LIST_GRAMMAR_STR = r"""
    page            = line*
    line            = entry newline

    entry           = subheading / heading / item / other

    # '===' must precede '==' so deeper headings never open a topic
    subheading      = "===" ~r"[^\n]*"
    heading         = "==" heading_text "==" ~r"[^\n]*"
    heading_text    = ~r"[^=\n]+"

    item            = ~r"[*#]+" item_piece*
    item_piece      = link / text_run / stray
    link            = "[[" target label? "]]"
    target          = ~r"[^\]|\n]+"
    label           = "|" ~r"[^\]\n]*"
    text_run        = ~r"(?:(?!\[\[)[^\n])+"
    stray           = "["

    other           = ~r"[^\n]*"
    newline         = "\n"
"""

SEED_LIST_GRAMMAR = Grammar(SEED_LIST_GRAMMAR_STR)
