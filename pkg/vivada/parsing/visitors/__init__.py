from vivada.parsing.visitors.seed_list import SeedListVisitor, article_url, is_article
