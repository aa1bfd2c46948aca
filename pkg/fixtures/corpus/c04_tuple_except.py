def rain():
    total = 0
    count = 0
    while True:
        text = input("Give rainfall (-999 ends): ")
        if text == "-999":
            break
        try:
            amount = float(text)
        except (ValueError, TypeError):
            continue
        if amount < 0:
            continue
        total += amount
        count += 1
    if count > 0:
        return total / count
    return 0

if __name__ == "__main__":
    print(rain())
