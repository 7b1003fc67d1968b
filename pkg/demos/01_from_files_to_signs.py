"""
From quote and trade files to per-second signs
==============================================

Raw files are parsed and cut to the market window. Each day is then sampled
on a one-second grid, and its trades are signed by the tick rule.
"""

import io

import numpy as np

from priceresponse import (MarketWindow, build_midpoint_series, classify_trade_scale, filter_market_time,
                           parse_quotes, parse_trades, sign_series_for_day)

quotes_csv = """day,time,bid,ask,bid_vol,ask_vol
2008-01-02,09:39:59,99.98,100.00,100,100
2008-01-02,09:40:00,100.00,100.02,500,300
2008-01-02,09:40:00,100.01,100.03,200,200
2008-01-02,09:40:03,100.02,100.04,100,100
2008-01-02,09:40:04,100.05,100.01,100,100
"""
trades_csv = """day,time,price,volume
2008-01-02,09:40:01,100.03,200
2008-01-02,09:40:01,100.03,100
2008-01-02,09:40:02,100.02,300
2008-01-02,09:40:04,100.04,100
2008-01-02,09:40:04,100.04,100
2008-01-02,09:40:04,100.02,100
"""

# %%
# The crossed quote at 09:40:04 is rejected with its line number.
quotes = parse_quotes(io.StringIO(quotes_csv))
trades = parse_trades(io.StringIO(trades_csv))
print("quotes kept:", len(quotes), "rejected:", quotes.rejects.rows)

# %%
# 09:39:59 falls outside the window.
window = MarketWindow(MarketWindow().open_s, MarketWindow().open_s + 6)
quotes = filter_market_time(quotes, window)
print("in window:", [q.t - window.open_s for q in quotes], "seq:", quotes.seq.tolist())

# %%
# The last quote of a second sets its midpoint; quiet seconds carry it forward.
mid = build_midpoint_series(quotes, window)
print("midpoint per second:", np.round(mid.m, 3))

# %%
# Tick rule: the first trade has nothing to compare with and stays unresolved.
print("trade signs:", classify_trade_scale(trades.price).signs)
signs = sign_series_for_day(trades, window)
print("N:", signs.N, "E:", signs.E, "eps:", signs.eps_p, "unresolved:", signs.unresolved)
