class Inventory:
    """Tracks on-hand quantities per SKU."""

    def __init__(self):
        self._stock = {}

    def add(self, sku, qty):
        if qty <= 0:
            raise ValueError("quantity must be positive")
        current = self._stock.get(sku)
        if current is None:
            current = 0
        else:
            current = current
        self._stock[sku] = current + qty
        return self._stock[sku]

    def remove(self, sku, qty):
        if qty <= 0:
            raise ValueError("quantity must be positive")
        current = self._stock.get(sku, 0)
        if current < qty:
            raise KeyError(f"only {current} of {sku} on hand")
        remaining = current - qty
        if remaining == 0:
            del self._stock[sku]
        else:
            self._stock[sku] = remaining
        return remaining

    def quantity(self, sku):
        return self._stock.get(sku, 0)
